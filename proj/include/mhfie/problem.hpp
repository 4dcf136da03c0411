#pragma once

// Weakly singular Fredholm-Hammerstein problems
//
//     lambda u(x) = g(x) + int Theta(s, x) psi(s, u(s)) ds
//
// on (0,1) or (0,1)^2, with Theta = |x - s|^{-mu} k, log|x - s| k, or a
// kernel k without diagonal singularity.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "mhfie/error.hpp"
#include "mhfie/mhf.hpp"
#include "mhfie/reference_quadrature.hpp"

namespace mhfie {

/// Coordinates of a point of (0,1)^d, one UnitPoint per dimension.
using Coords = std::span<const UnitPoint>;
using Field = std::function<double(Coords)>;
using Field1D = std::function<double(const UnitPoint&)>;

enum class KernelKind {
  Algebraic,    // |x - s|^{-mu} per dimension
  Logarithmic,  // log|x - s| per dimension
  Regular,      // no diagonal singularity; Theta = k
};

inline std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::Algebraic: return "algebraic";
    case KernelKind::Logarithmic: return "logarithmic";
    case KernelKind::Regular: return "regular";
  }
  return "unknown";
}

struct KernelSpec {
  KernelKind kind = KernelKind::Logarithmic;
  std::array<double, 2> mu{0.5, 0.5};
  /// k(s, x); empty means k == 1. Receives the integration point and the target point.
  std::function<double(Coords s, Coords x)> smooth_factor;

  static KernelSpec algebraic(double mu1, double mu2 = 0.5) {
    for (double m : {mu1, mu2})
      if (!(m > 0.0 && m < 1.0))
        throw ContractError("KernelSpec: algebraic exponent must lie in (0,1), got " + detail::format_g(m));
    KernelSpec k;
    k.kind = KernelKind::Algebraic;
    k.mu = {mu1, mu2};
    return k;
  }
  static KernelSpec logarithmic() { return KernelSpec{}; }
  static KernelSpec regular(std::function<double(Coords, Coords)> factor) {
    KernelSpec k;
    k.kind = KernelKind::Regular;
    k.smooth_factor = std::move(factor);
    return k;
  }

  bool diagonal_singular() const noexcept { return kind != KernelKind::Regular; }

  /// Singular factor theta_d for one dimension, given the separation |x - s|.
  double singular_part(int dim, double sep) const {
    switch (kind) {
      case KernelKind::Algebraic: return std::pow(sep, -mu[static_cast<std::size_t>(dim)]);
      case KernelKind::Logarithmic: return std::log(sep);
      case KernelKind::Regular: return 1.0;
    }
    return 1.0;
  }

  double factor(Coords s, Coords x) const { return smooth_factor ? smooth_factor(s, x) : 1.0; }
};

/// Theta(s, x) for points given with complements. Throws on the diagonal.
inline double kernel_eval(const KernelSpec& spec, Coords s, Coords x) {
  if (s.size() != x.size() || s.empty() || s.size() > 2)
    throw ContractError("kernel_eval: point dimensions disagree");
  double v = spec.factor(s, x);
  for (std::size_t d = 0; d < s.size(); ++d) {
    const double sep = separation(s[d], x[d]);
    if (spec.diagonal_singular() && relative_separation(s[d], x[d]) < 1e-14)
      throw DomainError("kernel_eval: diagonal singularity at s=" + detail::format_g(s[d].x) +
                        ", x=" + detail::format_g(x[d].x));
    v *= spec.singular_part(static_cast<int>(d), sep);
  }
  return v;
}

inline double kernel_eval(const KernelSpec& spec, double s, double x) {
  const std::array<UnitPoint, 1> sp{UnitPoint::from_value(s)};
  const std::array<UnitPoint, 1> xp{UnitPoint::from_value(x)};
  return kernel_eval(spec, Coords(sp), Coords(xp));
}

inline double kernel_eval(const KernelSpec& spec, double s, double t, double x, double y) {
  const std::array<UnitPoint, 2> sp{UnitPoint::from_value(s), UnitPoint::from_value(t)};
  const std::array<UnitPoint, 2> xp{UnitPoint::from_value(x), UnitPoint::from_value(y)};
  return kernel_eval(spec, Coords(sp), Coords(xp));
}

/// Hammerstein nonlinearity psi(s, u) with its u-derivative.
struct Nonlinearity {
  std::function<double(Coords s, double u)> psi;
  std::function<double(Coords s, double u)> dpsi_du;
  bool linear = false;  // psi(s, u) = u

  static Nonlinearity identity() {
    return {[](Coords, double u) { return u; }, [](Coords, double) { return 1.0; }, true};
  }
  static Nonlinearity square() {
    return {[](Coords, double u) { return u * u; }, [](Coords, double u) { return 2.0 * u; }, false};
  }

  /// Wraps a user pair after checking dpsi_du against a centered difference on a probe grid.
  static Nonlinearity make(std::function<double(Coords, double)> psi,
                           std::function<double(Coords, double)> dpsi_du) {
    Nonlinearity n{std::move(psi), std::move(dpsi_du), false};
    n.check_derivative();
    return n;
  }

  void check_derivative() const {
    if (!psi || !dpsi_du) throw ContractError("Nonlinearity: psi and dpsi_du are both required");
    for (double s : {0.1, 0.5, 0.9}) {
      const std::array<UnitPoint, 2> pt{UnitPoint::from_value(s), UnitPoint::from_value(1.0 - s)};
      for (double u : {-2.0, -0.5, 0.3, 1.0, 3.0}) {
        const double h = 1e-5 * std::max(1.0, std::abs(u));
        const double fd = (psi(Coords(pt), u + h) - psi(Coords(pt), u - h)) / (2.0 * h);
        const double d = dpsi_du(Coords(pt), u);
        if (!(std::abs(fd - d) <= 1e-5 * std::max(1.0, std::abs(d))))
          throw ContractError("Nonlinearity: dpsi_du(" + detail::format_g(s) + ", " + detail::format_g(u) + ") = " +
                              detail::format_g(d) + " but finite difference gives " + detail::format_g(fd));
      }
    }
  }
};

/// One term a(s) b(t) of a separable 2D integrand psi(s, t, u(s, t)).
struct SeparableTerm {
  Field1D a;
  Field1D b;
};

/// Memo of forcing values and 1D oracle integrals, keyed by coordinate bit patterns.
class ForcingCache {
 public:
  using Key = std::array<std::uint64_t, 5>;

  template <class Compute>
  double get(const Key& key, Compute&& compute) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = values_.find(key); it != values_.end()) return it->second;
    }
    const double v = compute();
    std::lock_guard lock(mutex_);
    values_.emplace(key, v);
    return v;
  }

  static Key key(std::uint64_t tag, Coords x) {
    Key k{tag, 0, 0, 0, 0};
    for (std::size_t d = 0; d < x.size() && d < 2; ++d) {
      k[2 * d + 1] = std::bit_cast<std::uint64_t>(x[d].x);
      k[2 * d + 2] = std::bit_cast<std::uint64_t>(x[d].xc);
    }
    return k;
  }

 private:
  std::mutex mutex_;
  std::map<Key, double> values_;
};

/// Owns a ForcingCache; copies start empty so an edited copy never sees stale values.
class CacheHandle {
 public:
  CacheHandle() : cache_(std::make_shared<ForcingCache>()) {}
  CacheHandle(const CacheHandle&) : cache_(std::make_shared<ForcingCache>()) {}
  CacheHandle& operator=(const CacheHandle&) {
    cache_ = std::make_shared<ForcingCache>();
    return *this;
  }
  CacheHandle(CacheHandle&&) noexcept = default;
  CacheHandle& operator=(CacheHandle&&) noexcept = default;

  ForcingCache* operator->() const noexcept { return cache_.get(); }

 private:
  std::shared_ptr<ForcingCache> cache_;
};

struct ProblemSpec {
  std::string name;
  int dimension = 1;
  double lambda = 1.0;
  /// g(x); when empty it is manufactured from exact_solution.
  Field forcing;
  KernelSpec kernel;
  Nonlinearity nonlinearity = Nonlinearity::identity();
  /// Known solution, if any.
  Field exact_solution;
  /// psi(s, t, u(s, t)) = sum_r a_r(s) b_r(t); needed to manufacture 2D forcings.
  std::vector<SeparableTerm> separable_integrand;
  CacheHandle cache;

  void validate() const {
    if (dimension != 1 && dimension != 2)
      throw ContractError("ProblemSpec: dimension must be 1 or 2, got " + std::to_string(dimension));
    if (!(lambda != 0.0) || !std::isfinite(lambda)) throw ContractError("ProblemSpec: lambda must be nonzero");
    if (!forcing && !exact_solution)
      throw ContractError("ProblemSpec '" + name + "': neither forcing nor exact solution given");
    if (!nonlinearity.psi || !nonlinearity.dpsi_du)
      throw ContractError("ProblemSpec '" + name + "': nonlinearity incomplete");
  }

  double exact(Coords x) const {
    if (!exact_solution) throw ContractError("ProblemSpec '" + name + "': no exact solution");
    return exact_solution(x);
  }

  bool has_exact() const noexcept { return static_cast<bool>(exact_solution); }

  /// g at x, explicit or manufactured, memoized.
  double forcing_at(Coords x) const;
};

/// Closed-form int_0^1 theta(s, x) ds for k == 1 (per dimension).
inline double exact_smooth_integral(const KernelSpec& kernel, double x, int dim = 0) {
  detail::require_open_unit(x, "exact_smooth_integral");
  switch (kernel.kind) {
    case KernelKind::Algebraic: {
      const double m = kernel.mu[static_cast<std::size_t>(dim)];
      return (std::pow(x, 1.0 - m) + std::pow(1.0 - x, 1.0 - m)) / (1.0 - m);
    }
    case KernelKind::Logarithmic: return x * std::log(x) + (1.0 - x) * std::log1p(-x) - 1.0;
    case KernelKind::Regular: return 1.0;
  }
  return 0.0;
}

namespace detail {

/// int_0^1 theta_d(s, x) f(s) ds with the split tanh-sinh oracle.
inline double oracle_axis_integral(const KernelSpec& kernel, int dim, const Field1D& f, const UnitPoint& x) {
  return singular_split_integral(
      [&](const UnitPoint& s, double sep) {
        const double fs = f(s);
        if (fs == 0.0) return 0.0;
        return kernel.singular_part(dim, sep) * fs;
      },
      x);
}

}  // namespace detail

/// g(x) = lambda u(x) - int Theta(s, x) psi(s, u(s)) ds by the reference oracle.
///
/// 1D: split tanh-sinh at s = x. 2D: the kernel must be a product of per-axis
/// singular factors (k == 1) and the integrand must be given in separable form,
/// so the double integral reduces to sums of products of 1D oracle integrals.
inline double manufactured_forcing(const ProblemSpec& spec, Coords x) {
  if (!spec.exact_solution) throw ContractError("manufactured_forcing: problem has no exact solution");
  if (static_cast<int>(x.size()) != spec.dimension) throw ContractError("manufactured_forcing: dimension mismatch");
  const double lu = spec.lambda * spec.exact_solution(x);
  if (spec.dimension == 1) {
    const UnitPoint xp = x[0];
    const double integral = singular_split_integral(
        [&](const UnitPoint& s, double sep) {
          const std::array<UnitPoint, 1> sp{s};
          const double p = spec.nonlinearity.psi(Coords(sp), spec.exact_solution(Coords(sp)));
          if (p == 0.0) return 0.0;
          return spec.kernel.singular_part(0, sep) * spec.kernel.factor(Coords(sp), x) * p;
        },
        xp);
    return lu - integral;
  }
  if (spec.separable_integrand.empty() || spec.kernel.smooth_factor)
    throw ContractError("manufactured_forcing: 2D forcing needs a separable integrand and k == 1");
  double integral = 0.0;
  for (std::size_t r = 0; r < spec.separable_integrand.size(); ++r) {
    const auto& term = spec.separable_integrand[r];
    const std::array<UnitPoint, 1> px{x[0]};
    const std::array<UnitPoint, 1> py{x[1]};
    const double ix = spec.cache->get(ForcingCache::key(1000 + 2 * r, Coords(px)), [&] {
      return detail::oracle_axis_integral(spec.kernel, 0, term.a, x[0]);
    });
    const double iy = spec.cache->get(ForcingCache::key(1001 + 2 * r, Coords(py)), [&] {
      return detail::oracle_axis_integral(spec.kernel, 1, term.b, x[1]);
    });
    integral += ix * iy;
  }
  return lu - integral;
}

inline double manufactured_forcing(const ProblemSpec& spec, double x) {
  const std::array<UnitPoint, 1> p{UnitPoint::from_value(x)};
  return manufactured_forcing(spec, Coords(p));
}

inline double manufactured_forcing(const ProblemSpec& spec, double x, double y) {
  const std::array<UnitPoint, 2> p{UnitPoint::from_value(x), UnitPoint::from_value(y)};
  return manufactured_forcing(spec, Coords(p));
}

inline double ProblemSpec::forcing_at(Coords x) const {
  if (forcing) return forcing(x);
  return cache->get(ForcingCache::key(0, x), [&] { return manufactured_forcing(*this, x); });
}

}  // namespace mhfie
