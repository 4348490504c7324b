#include "bsld.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "bsld/bowen_series.hpp"
#include "bsld/errors.hpp"
#include "bsld/geodesics.hpp"
#include "bsld/group.hpp"
#include "bsld/json_io.hpp"
#include "bsld/ldp.hpp"
#include "bsld/thermo.hpp"

struct bsld_domain {
  bsld::FundamentalDomain dom;
};
struct bsld_partition {
  bsld::MarkovPartition part;
};
struct bsld_pressure {
  bsld::PressureCurve curve;
};
struct bsld_spectrum {
  bsld::SpectrumCurve curve;
};

namespace {

thread_local std::string g_error_msg;
thread_local std::string g_error_name;

bsld_status classify(const bsld::Error& e) {
  const std::string& n = e.name();
  if (n == "BadDomainFile" || n == "PairingMismatch" || n == "OddCorner" ||
      n == "CycleNotClosing" || n == "CarrierOrderViolation" ||
      n == "NotMarkov" || n == "EmptyBase")
    return BSLD_ERR_DOMAIN;
  if (n == "BadConfig" || n == "DegenerateGeodesic" ||
      n == "NotEnteringDomain" || n == "NoExitSide")
    return BSLD_ERR_ARGUMENT;
  if (n == "AlphaOutOfRange" || n == "WindowTooLong") return BSLD_ERR_RANGE;
  return BSLD_ERR_NUMERIC;  // Overflow, stalls, ZeroHits, ...
}

template <typename Fn>
bsld_status wrap(Fn&& fn) {
  try {
    fn();
    g_error_msg.clear();
    g_error_name.clear();
    return BSLD_OK;
  } catch (const bsld::Error& e) {
    g_error_msg = e.what();
    g_error_name = e.name();
    return classify(e);
  } catch (const std::exception& e) {
    g_error_msg = e.what();
    g_error_name = "Unknown";
    return BSLD_ERR_UNKNOWN;
  }
}

bsld_status fail_argument(const char* msg) {
  g_error_msg = msg;
  g_error_name = "BadArgument";
  return BSLD_ERR_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* bsld_last_error(void) { return g_error_msg.c_str(); }
const char* bsld_last_error_name(void) { return g_error_name.c_str(); }

bsld_status bsld_domain_octagon(bsld_domain** out) {
  if (!out) return fail_argument("null output pointer");
  return wrap([&] {
    *out = new bsld_domain{bsld::FundamentalDomain::octagon()};
  });
}

bsld_status bsld_domain_quadrilateral(bsld_domain** out) {
  if (!out) return fail_argument("null output pointer");
  return wrap([&] {
    *out = new bsld_domain{bsld::FundamentalDomain::quadrilateral()};
  });
}

bsld_status bsld_domain_load(const char* path, bsld_domain** out) {
  if (!path || !out) return fail_argument("null path or output pointer");
  return wrap([&] { *out = new bsld_domain{bsld::load_domain(path)}; });
}

void bsld_domain_free(bsld_domain* dom) { delete dom; }

bsld_status bsld_domain_validate(const bsld_domain* dom) {
  if (!dom) return fail_argument("null domain");
  return wrap([&] { dom->dom.require_admissible(); });
}

bsld_status bsld_domain_num_sides(const bsld_domain* dom, int* out) {
  if (!dom || !out) return fail_argument("null domain or output pointer");
  *out = dom->dom.num_sides();
  return BSLD_OK;
}

bsld_status bsld_domain_has_cusps(const bsld_domain* dom, int* out) {
  if (!dom || !out) return fail_argument("null domain or output pointer");
  *out = dom->dom.has_cusps() ? 1 : 0;
  return BSLD_OK;
}

bsld_status bsld_domain_json(const bsld_domain* dom, char** out) {
  if (!dom || !out) return fail_argument("null domain or output pointer");
  return wrap([&] { *out = dup_string(bsld::domain_to_json(dom->dom).dump(2)); });
}

void bsld_string_free(char* s) { delete[] s; }

bsld_status bsld_partition_build(const bsld_domain* dom, bsld_partition** out) {
  if (!dom || !out) return fail_argument("null domain or output pointer");
  return wrap([&] {
    *out = new bsld_partition{
        bsld::MarkovPartition(bsld::BowenSeriesMap(dom->dom))};
  });
}

void bsld_partition_free(bsld_partition* part) { delete part; }

bsld_status bsld_partition_size(const bsld_partition* part, int* out) {
  if (!part || !out) return fail_argument("null partition or output pointer");
  *out = part->part.size();
  return BSLD_OK;
}

bsld_status bsld_partition_cell(const bsld_partition* part, int index,
                                double* lo, double* len) {
  if (!part || !lo || !len) return fail_argument("null partition or output pointer");
  if (index < 0 || index >= part->part.size())
    return fail_argument("cell index out of range");
  bsld::Arc a = part->part.arc(index);
  *lo = a.lo;
  *len = a.len;
  return BSLD_OK;
}

bsld_status bsld_partition_json(const bsld_partition* part, char** out) {
  if (!part || !out) return fail_argument("null partition or output pointer");
  return wrap([&] {
    *out = dup_string(bsld::partition_to_json(part->part).dump(2));
  });
}

bsld_status bsld_map_num_branches(const bsld_partition* part, int* out) {
  if (!part || !out) return fail_argument("null partition or output pointer");
  *out = part->part.map().num_branches();
  return BSLD_OK;
}

bsld_status bsld_map_branch(const bsld_partition* part, int index, double* lo,
                            double* len, int* label_index, int* label_bar) {
  if (!part || !lo || !len || !label_index || !label_bar)
    return fail_argument("null partition or output pointer");
  if (index < 0 || index >= part->part.map().num_branches())
    return fail_argument("branch index out of range");
  const bsld::Branch& br = part->part.map().branch(index);
  *lo = br.arc.lo;
  *len = br.arc.len;
  *label_index = br.label.index;
  *label_bar = br.label.bar ? 1 : 0;
  return BSLD_OK;
}

bsld_status bsld_map_apply(const bsld_partition* part, double theta,
                           double* image, double* log_deriv) {
  if (!part || !image || !log_deriv)
    return fail_argument("null partition or output pointer");
  return wrap([&] {
    const bsld::BowenSeriesMap& f = part->part.map();
    bsld::BoundaryPoint x(theta);
    *image = f.apply(x).theta;
    *log_deriv = std::log(f.derivative(x));
  });
}

bsld_status bsld_pressure_compute(const bsld_partition* part,
                                  bsld_pressure** out) {
  if (!part || !out) return fail_argument("null partition or output pointer");
  return wrap([&] {
    *out = new bsld_pressure{bsld::pressure_curve(part->part)};
  });
}

void bsld_pressure_free(bsld_pressure* p) { delete p; }

bsld_status bsld_pressure_eval(const bsld_pressure* p, double beta,
                               double* value) {
  if (!p || !value) return fail_argument("null curve or output pointer");
  return wrap([&] { *value = p->curve.p(beta); });
}

bsld_status bsld_pressure_num_points(const bsld_pressure* p, int* out) {
  if (!p || !out) return fail_argument("null curve or output pointer");
  *out = static_cast<int>(p->curve.points().size());
  return BSLD_OK;
}

bsld_status bsld_pressure_point(const bsld_pressure* p, int index, double* beta,
                                double* p_hat, int* has_bracket, double* lo,
                                double* hi) {
  if (!p || !beta || !p_hat || !has_bracket || !lo || !hi)
    return fail_argument("null curve or output pointer");
  const auto& pts = p->curve.points();
  if (index < 0 || index >= static_cast<int>(pts.size()))
    return fail_argument("pressure point index out of range");
  const bsld::PressurePoint& pt = pts[static_cast<size_t>(index)];
  *beta = pt.beta;
  *p_hat = pt.p_hat;
  *has_bracket = pt.bracket.has_value() ? 1 : 0;
  *lo = pt.bracket ? pt.bracket->first : 0.0;
  *hi = pt.bracket ? pt.bracket->second : 0.0;
  return BSLD_OK;
}

bsld_status bsld_spectrum_compute(const bsld_pressure* p, int grid_size,
                                  bsld_spectrum** out) {
  if (!p || !out) return fail_argument("null curve or output pointer");
  if (grid_size < 5) return fail_argument("spectrum grid needs >= 5 points");
  return wrap([&] {
    *out = new bsld_spectrum{bsld::spectrum_curve(p->curve, grid_size)};
  });
}

void bsld_spectrum_free(bsld_spectrum* s) { delete s; }

bsld_status bsld_spectrum_num_points(const bsld_spectrum* s, int* out) {
  if (!s || !out) return fail_argument("null spectrum or output pointer");
  *out = static_cast<int>(s->curve.points.size());
  return BSLD_OK;
}

bsld_status bsld_spectrum_point(const bsld_spectrum* s, int index, double* alpha,
                                double* beta, double* b, double* rate,
                                double* rate_prime) {
  if (!s || !alpha || !beta || !b || !rate || !rate_prime)
    return fail_argument("null spectrum or output pointer");
  if (index < 0 || index >= static_cast<int>(s->curve.points.size()))
    return fail_argument("spectrum point index out of range");
  const bsld::SpectrumPoint& pt = s->curve.points[static_cast<size_t>(index)];
  *alpha = pt.alpha;
  *beta = pt.beta;
  *b = pt.b;
  *rate = pt.I;
  *rate_prime = pt.I_prime;
  return BSLD_OK;
}

bsld_status bsld_spectrum_alpha_typical(const bsld_spectrum* s, double* out) {
  if (!s || !out) return fail_argument("null spectrum or output pointer");
  *out = s->curve.alpha_G;
  return BSLD_OK;
}

bsld_status bsld_legendre_eval(const bsld_pressure* p, double alpha,
                               double* beta, double* b, double* rate) {
  if (!p || !beta || !b || !rate)
    return fail_argument("null curve or output pointer");
  return wrap([&] {
    bsld::LegendrePoint lp = bsld::legendre_data(p->curve, alpha);
    *beta = lp.beta;
    *b = lp.b;
    *rate = lp.I;
  });
}

bsld_status bsld_geodesic_sample(const bsld_domain* dom, uint64_t seed,
                                 double k_radius, int count, double* src_theta,
                                 double* dst_theta) {
  if (!dom || !src_theta || !dst_theta)
    return fail_argument("null domain or output pointer");
  if (count < 1) return fail_argument("sample count must be >= 1");
  return wrap([&] {
    std::optional<double> k;
    if (k_radius >= 0.0) k = k_radius;
    bsld::GeodesicSampler sampler(dom->dom, seed, k);
    for (int i = 0; i < count; ++i) {
      bsld::OrientedGeodesic geo = sampler.next();
      src_theta[i] = geo.src().theta;
      dst_theta[i] = geo.dst().theta;
    }
  });
}

bsld_status bsld_geodesic_trace(const bsld_domain* dom, double src_theta,
                                double dst_theta, int n, int* sides,
                                int* deformed, double* t, double* s, double* u) {
  if (!dom) return fail_argument("null domain");
  if (n < 1) return fail_argument("trace depth must be >= 1");
  return wrap([&] {
    bsld::BowenSeriesMap f(dom->dom);
    bsld::OrientedGeodesic geo{bsld::BoundaryPoint(src_theta),
                               bsld::BoundaryPoint(dst_theta)};
    bsld::GrowthTrace trace = bsld::growth_trace(dom->dom, f, geo, n);
    for (int k = 0; k < n; ++k) {
      if (sides)
        sides[k] = dom->dom.side_with_label(
            trace.cut.symbols[static_cast<size_t>(k)]);
      if (deformed) deformed[k] = 0;
    }
    if (deformed)
      for (int idx : trace.cut.deformation_events)
        if (idx >= 0 && idx < n) deformed[idx] = 1;
    for (int k = 0; k <= n; ++k) {
      if (t) t[k] = trace.t[static_cast<size_t>(k)];
      if (s) s[k] = trace.s[static_cast<size_t>(k)];
      if (u) u[k] = trace.u[static_cast<size_t>(k)];
    }
  });
}

bsld_status bsld_er_statistic(const bsld_domain* dom, uint64_t seed,
                              double k_radius, int count, int n,
                              double rate_alpha, double* stats) {
  if (!dom || !stats) return fail_argument("null domain or output pointer");
  if (count < 1 || n < 2) return fail_argument("need count >= 1 and n >= 2");
  return wrap([&] {
    std::optional<double> k;
    if (k_radius >= 0.0) k = k_radius;
    bsld::GeodesicSampler sampler(dom->dom, seed, k);
    bsld::BowenSeriesMap f(dom->dom);
    for (int i = 0; i < count; ++i) {
      // A sampled geodesic can still stall numerically deep into the walk
      // (e.g. drifting into a cusp); redraw a few times before giving up.
      int attempts = 0;
      for (;;) {
        bsld::OrientedGeodesic geo = sampler.next();
        try {
          bsld::GrowthTrace trace = bsld::growth_trace(dom->dom, f, geo, n);
          stats[i] = bsld::erdos_renyi_statistic(trace, rate_alpha, n);
          break;
        } catch (const bsld::NoExitSide&) {
          if (++attempts >= 10) throw;
        } catch (const bsld::NotEnteringDomain&) {
          if (++attempts >= 10) throw;
        }
      }
    }
  });
}

bsld_status bsld_tail_mc(const bsld_partition* part, double alpha, int upper,
                         const int* n_list, int n_count, long long samples,
                         uint64_t seed, double* m_hat, double* se,
                         double* slope, int* slope_ok) {
  if (!part || !n_list || !m_hat || !se || !slope || !slope_ok)
    return fail_argument("null partition or output pointer");
  if (n_count < 1) return fail_argument("need at least one depth");
  return wrap([&] {
    std::vector<int> depths(n_list, n_list + n_count);
    bsld::TailEstimate est = bsld::birkhoff_tail_mc(
        part->part.map(), alpha, upper != 0, depths, samples, seed);
    for (int i = 0; i < n_count; ++i) {
      m_hat[i] = est.m_hat[static_cast<size_t>(i)];
      se[i] = est.se[static_cast<size_t>(i)];
    }
    *slope = est.slope;
    *slope_ok = est.slope_ok ? 1 : 0;
  });
}

bsld_status bsld_tail_cylinder(const bsld_partition* part, double alpha, int n,
                               double* mass) {
  if (!part || !mass) return fail_argument("null partition or output pointer");
  return wrap([&] { *mass = bsld::cylinder_tail(part->part, alpha, n); });
}

}  // extern "C"
