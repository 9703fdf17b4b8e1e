#include "jacobi/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

#include "jacobi/fock.hpp"
#include "jacobi/geometry.hpp"
#include "jacobi/weinorman.hpp"

namespace jacobi::runner {

namespace {

using geometry::BargmannIndex;
namespace fs = std::filesystem;

constexpr Real kInf = std::numeric_limits<Real>::infinity();

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      fail(path + "." + key, "unknown field");
  }
}

// ---------------------------------------------------------------- packing

// Real state layout: re/im of the n-vector, re/im of the n x n matrix
// (row-major), then method-specific scalars.
RVector pack(const CVector& v, const CMatrix& W, std::initializer_list<Real> extras = {}) {
  const Eigen::Index n = v.size();
  RVector y(2 * n + 2 * n * n + static_cast<Eigen::Index>(extras.size()));
  Eigen::Index p = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    y[p++] = v[i].real();
    y[p++] = v[i].imag();
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      y[p++] = W(i, j).real();
      y[p++] = W(i, j).imag();
    }
  for (Real e : extras) y[p++] = e;
  return y;
}

void unpack(const RVector& y, int n, CVector& v, CMatrix& W) {
  v.resize(n);
  W.resize(n, n);
  Eigen::Index p = 0;
  for (int i = 0; i < n; ++i, p += 2) v[i] = {y[p], y[p + 1]};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j, p += 2) W(i, j) = {y[p], y[p + 1]};
}

Eigen::Index extras_offset(int n) { return 2 * n + 2 * n * n; }

// ---------------------------------------------------------------- driving

using RhsFor = std::function<integrate::Rhs<RVector>(const BallCoefficients&)>;
using Recorder = std::function<void(Real, const RVector&)>;

// Integrates across the output grid, restarting at schedule breakpoints so
// that no step straddles a coefficient jump.
void drive(const ExperimentConfig& cfg, const Schedule& sch, RVector y, integrate::Method method, const RhsFor& rhs_for,
           const Recorder& record) {
  const auto& g = cfg.grid;
  g.validate();
  const int intervals = g.intervals();
  const std::vector<Real> bps = sch.breakpoints(g.t0, g.t1);
  const auto ignore = [](int, Real, const RVector&) {};
  record(g.t0, y);
  std::size_t b = 0;
  for (int i = 1; i <= intervals; ++i) {
    Real a = g.time(i - 1);
    const Real target = g.time(i);
    while (a < target) {
      while (b < bps.size() && bps[b] <= a) ++b;
      const Real e = (b < bps.size() && bps[b] < target) ? bps[b] : target;
      const auto f = rhs_for(sch.at(0.5 * (a + e)));
      try {
        y = integrate::integrate(f, y, integrate::TimeGrid{a, e, e - a}, method, ignore, cfg.adaptive);
      } catch (const DomainError& err) {
        std::ostringstream msg;
        msg << "trajectory left the domain during [" << a << ", " << e << "]: " << err.what();
        throw DomainError(msg.str());
      }
      a = e;
    }
    record(target, y);
  }
}

void require_margin(Method m, Real t, Real margin) {
  if (!(margin > 0.0)) {
    std::ostringstream msg;
    msg << method_name(m) << ": trajectory left the domain at t = " << t << " (margin " << margin << ")";
    throw DomainError(msg.str());
  }
}

// The energy is evaluated only once the sample is known to be in the domain.
template <class Energy>
void push_sample(Trajectory& tr, Real t, CVector v, CMatrix W, berezin::PhaseRecord ph, Energy&& energy_of) {
  const Real margin = geometry::ball_margin(W);
  require_margin(tr.method, t, margin);
  const Real energy = energy_of();
  tr.times.push_back(t);
  tr.vectors.push_back(std::move(v));
  tr.matrices.push_back(std::move(W));
  tr.phases.push_back(ph);
  tr.energy.push_back(energy);
  tr.margin.push_back(margin);
}

// Initial (z, W) and (eta, W) from whichever chart the config uses.
std::pair<CVector, CMatrix> initial_in(const InitialState& s, Chart want) {
  const bool have_jacobi = s.chart == Chart::Jacobi;
  const bool want_jacobi = want == Chart::Jacobi;
  if (have_jacobi == want_jacobi) return {s.vec, s.W};
  if (want_jacobi) return {geometry::fc_forward(s.vec, s.W), s.W};
  return {geometry::fc_inverse(s.vec, s.W), s.W};
}

const berezin::PhaseRecord kNoPhase{kNaN, kNaN, kNaN};

Trajectory simulate_berezin_disk(const ExperimentConfig& cfg, const Schedule& sch, bool fc_chart) {
  const BargmannIndex k(cfg.k);
  Trajectory tr;
  tr.method = fc_chart ? Method::BerezinFC : Method::BerezinDisk;
  tr.chart = fc_chart ? Chart::FC : Chart::Jacobi;
  auto [v0, W0] = initial_in(cfg.initial, tr.chart);
  const Eigen::Index off = extras_offset(1);

  auto rhs_for = [&](const BallCoefficients& bc) -> integrate::Rhs<RVector> {
    const ComplexCoefficients c = to_disk(bc);
    return [c, k, fc_chart, off](Real, const RVector& y) -> RVector {
      const Complex a{y[0], y[1]};
      const Complex w{y[2], y[3]};
      Complex da, dw, eta;
      if (fc_chart) {
        const auto r = berezin::rhs_fc(c, a, w);
        da = r.deta;
        dw = r.dw;
        eta = a;
      } else {
        const auto r = berezin::rhs_disk(c, a, w);
        da = r.dz;
        dw = r.dw;
        eta = geometry::fc_inverse(a, w);
      }
      const auto ph = berezin::phase_rhs(c, eta, w, k);
      RVector d(off + 2);
      d << da.real(), da.imag(), dw.real(), dw.imag(), ph.phi_D, ph.phi_B;
      return d;
    };
  };
  auto record = [&](Real t, const RVector& y) {
    CVector v;
    CMatrix W;
    unpack(y, 1, v, W);
    const Complex w = W(0, 0);
    const berezin::PhaseRecord ph{y[off], y[off + 1], y[off] + y[off + 1]};
    push_sample(tr, t, v, W, ph, [&] {
      const Complex eta = fc_chart ? v[0] : geometry::fc_inverse(v[0], w);
      return berezin::energy(sch.disk_at(t), eta, w, k);
    });
  };
  drive(cfg, sch, pack(v0, W0, {0.0, 0.0}), cfg.integrator, rhs_for, record);
  return tr;
}

Trajectory simulate_ball(const ExperimentConfig& cfg, const Schedule& sch, bool fc_chart) {
  const BargmannIndex k(cfg.k);
  const int n = sch.n();
  Trajectory tr;
  tr.n = n;
  tr.method = fc_chart ? Method::BerezinFC : Method::BerezinBall;
  tr.chart = fc_chart ? Chart::FC : Chart::Jacobi;
  auto [v0, W0] = initial_in(cfg.initial, tr.chart);

  auto rhs_for = [&](const BallCoefficients& bc) -> integrate::Rhs<RVector> {
    return [&bc, n, fc_chart](Real, const RVector& y) -> RVector {
      CVector v;
      CMatrix W;
      unpack(y, n, v, W);
      if (fc_chart) {
        return pack(berezin::rhs_fc_ball(bc, v), berezin::riccati_rhs(bc, W));
      }
      const auto r = berezin::rhs_ball(bc, v, W);
      return pack(r.dz, r.dW);
    };
  };
  auto record = [&](Real t, const RVector& y) {
    CVector v;
    CMatrix W;
    unpack(y, n, v, W);
    push_sample(tr, t, v, W, kNoPhase, [&] {
      if (n != 1) return kNaN;
      const Complex eta = fc_chart ? v[0] : geometry::fc_inverse(v[0], W(0, 0));
      return berezin::energy(sch.disk_at(t), eta, W(0, 0), k);
    });
  };
  drive(cfg, sch, pack(v0, W0), cfg.integrator, rhs_for, record);
  return tr;
}

Trajectory simulate_wei_norman(const ExperimentConfig& cfg, const Schedule& sch, Method tag) {
  const BargmannIndex k(cfg.k);
  Trajectory tr;
  tr.method = tag;
  tr.chart = Chart::WeiNorman;
  auto [v0, W0] = initial_in(cfg.initial, Chart::FC);
  const Eigen::Index off = extras_offset(1);
  Real residual = 0.0;

  auto rhs_for = [&](const BallCoefficients& bc) -> integrate::Rhs<RVector> {
    const auto rc = algebra::coeffs_to_real(to_disk(bc));
    return [rc, k, off](Real, const RVector& y) -> RVector {
      const weinorman::RealState s{y[0], y[1], y[2], y[3]};
      const auto d = weinorman::wn_rhs(rc, s);
      RVector out(off + 1);
      out << d.dx, d.dy, d.du, d.dv, weinorman::wn_phase_rhs(rc, s, k);
      return out;
    };
  };
  auto record = [&](Real t, const RVector& y) {
    const weinorman::RealState s{y[0], y[1], y[2], y[3]};
    const Real margin = 1.0 - std::norm(s.w());
    require_margin(tr.method, t, margin);
    const ComplexCoefficients c = sch.disk_at(t);
    const auto rc = algebra::coeffs_to_real(c);
    const auto q = weinorman::quasienergy_coeffs(rc, s, weinorman::wn_rhs(rc, s), weinorman::wn_phase_rhs(rc, s, k));
    residual = std::max({residual, std::abs(q.G1), std::abs(q.G2), std::abs(q.H1), std::abs(q.H2),
                         std::abs(q.G0 + k.value() * q.H0)});
    CVector v(1);
    v << s.alpha();
    CMatrix W(1, 1);
    W << s.w();
    // <H(c)> on T(alpha, w)|0>: the coherent-state symbol of the dictionary image.
    push_sample(tr, t, v, W, {kNaN, kNaN, y[off]},
                [&] { return berezin::energy(algebra::conjugation_dictionary(c), s.alpha(), s.w(), k); });
  };
  drive(cfg, sch, pack(v0, W0, {0.0}), cfg.integrator, rhs_for, record);
  tr.quasienergy_residual = residual;
  return tr;
}

// (eta, W) after time dt under constant coefficients, by matrix exponentials.
std::pair<CVector, CMatrix> linearized_step(const BallCoefficients& bc, const CVector& eta, const CMatrix& W, Real dt) {
  if (dt == 0.0) return {eta, W};
  const int n = bc.n();
  const CMatrix Wt = berezin::riccati_by_linearization(bc, geometry::BallPoint(W), dt).W();
  const auto sys = berezin::hr_matrix(bc);
  RMatrix aug = RMatrix::Zero(2 * n + 1, 2 * n + 1);
  aug.topLeftCorner(2 * n, 2 * n) = sys.h_r;
  aug.topRightCorner(2 * n, 1) = sys.F;
  const RMatrix g = (aug * dt).exp();
  RVector q(2 * n + 1);
  // eta = xi - i zeta
  q << eta.real(), -eta.imag(), 1.0;
  const RVector r = g * q;
  CVector out(n);
  for (int i = 0; i < n; ++i) out[i] = {r[i], -r[n + i]};
  return {out, Wt};
}

Trajectory simulate_linearized(const ExperimentConfig& cfg, const Schedule& sch) {
  const BargmannIndex k(cfg.k);
  const int n = sch.n();
  Trajectory tr;
  tr.n = n;
  tr.method = Method::RiccatiLinearized;
  tr.chart = Chart::FC;
  auto [eta_a, W_a] = initial_in(cfg.initial, Chart::FC);
  const auto& g = cfg.grid;
  g.validate();
  Real a = g.t0;
  const std::vector<Real> bps = sch.breakpoints(g.t0, g.t1);
  std::size_t b = 0;
  for (int i = 0; i <= g.intervals(); ++i) {
    const Real t = g.time(i);
    // Each segment is propagated from its own start, W = X Y^{-1}.
    while (b < bps.size() && bps[b] <= t) {
      std::tie(eta_a, W_a) = linearized_step(sch.at(a), eta_a, W_a, bps[b] - a);
      a = bps[b++];
    }
    auto [eta, W] = linearized_step(sch.at(a), eta_a, W_a, t - a);
    const CVector eta_t = eta;
    push_sample(tr, t, std::move(eta), W, kNoPhase,
                [&] { return n == 1 ? berezin::energy(sch.disk_at(t), eta_t[0], W(0, 0), k) : kNaN; });
  }
  return tr;
}

std::string number(Real x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

fs::path method_csv(const fs::path& base, Method m) {
  fs::path p = base;
  p.replace_filename(base.stem().string() + "." + method_name(m) + base.extension().string());
  return p;
}

void write_text(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  body(out);
  if (!out) throw Error("write to " + path.string() + " failed");
}

Json final_state_json(const Trajectory& tr) {
  const std::size_t last = tr.size() - 1;
  const char* key = tr.chart == Chart::Jacobi ? "z" : (tr.chart == Chart::FC ? "eta" : "alpha");
  return Json{{key, serialize::to_json(tr.vectors[last])}, {"W", serialize::to_json(tr.matrices[last])}};
}

// Energy is conserved only for constant coefficients; drift is reported only then.
Json trajectory_summary(const Trajectory& tr, bool constant) {
  Json j{{"method", method_name(tr.method)},
         {"chart", chart_name(tr.chart)},
         {"samples", tr.size()},
         {"margin_min", tr.margin_min()},
         {"energy_drift", constant ? tr.energy_drift() : kNaN},
         {"final", final_state_json(tr)}};
  const auto& ph = tr.phases.back();
  j["final_phase"] = Json{{"phi_D", ph.phi_D}, {"phi_B", ph.phi_B}, {"phi", ph.phi}};
  if (!std::isnan(tr.quasienergy_residual)) j["quasienergy_residual"] = tr.quasienergy_residual;
  return j;
}

Json fock_json(const FockCheck& f) {
  return Json{{"dim", f.dim}, {"fidelity", f.fidelity}, {"phase_error", f.phase_error}, {"tail", f.tail}};
}

Json tolerance_json(const Tolerances& t) {
  return Json{{"deviation", t.deviation}, {"phase_bridge", t.phase_bridge}, {"fidelity", t.fidelity}};
}

// ---------------------------------------------------------------- parsing

bool is_complex_pair(const Json& j) { return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(); }

BallCoefficients coefficients_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  if (j.contains("n")) return serialize::ball_coefficients_from_json(j, path);
  if (j.contains("nu1")) {
    check_keys(j, {"nu1", "nu2", "veps0", "veps1", "veps2"}, path);
    return BallCoefficients::from_disk(algebra::coeffs_from_real(serialize::real_coefficients_from_json(j, path)));
  }
  check_keys(j, {"eps_a_re", "eps_a_im", "eps_0", "eps_plus_re", "eps_plus_im"}, path);
  return BallCoefficients::from_disk(serialize::complex_coefficients_from_json(j, path));
}

Schedule schedule_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of segments");
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string sp = path + "[" + std::to_string(i) + "]";
    check_keys(j[i], {"until", "coefficients"}, sp);
    if (!j[i].contains("coefficients")) fail(sp + ".coefficients", "missing");
    const bool last = i + 1 == j.size();
    Real end = kInf;
    if (j[i].contains("until")) {
      if (last) fail(sp + ".until", "the last segment must not have an end time");
      end = serialize::real_from_json(j[i]["until"], sp + ".until");
      if (!segs.empty() && !(end > segs.back().end)) fail(sp + ".until", "segment ends must increase");
    } else if (!last) {
      fail(sp + ".until", "missing");
    }
    segs.push_back({end, coefficients_from_json(j[i]["coefficients"], sp + ".coefficients")});
    if (segs.back().coeffs.n() != segs.front().coeffs.n()) fail(sp + ".coefficients", "dimension differs from segment 0");
  }
  return Schedule(std::move(segs));
}

Chart chart_from_string(const std::string& s, const std::string& path) {
  if (s == "fc") return Chart::FC;
  if (s == "jacobi") return Chart::Jacobi;
  fail(path, "unknown chart '" + s + "' (expected fc or jacobi)");
}

InitialState initial_from_json(const Json& j, const std::string& path) {
  check_keys(j, {"chart", "eta", "z", "w", "W"}, path);
  InitialState s;
  if (!j.contains("chart") || !j["chart"].is_string()) fail(path + ".chart", "expected \"fc\" or \"jacobi\"");
  s.chart = chart_from_string(j["chart"].get<std::string>(), path + ".chart");
  const char* vkey = s.chart == Chart::FC ? "eta" : "z";
  const char* other = s.chart == Chart::FC ? "z" : "eta";
  if (j.contains(other)) fail(path + "." + other, std::string("not used by chart ") + chart_name(s.chart));
  if (!j.contains(vkey)) fail(path + "." + vkey, "missing");
  const Json& jv = j[vkey];
  if (is_complex_pair(jv)) {
    s.vec = CVector(1);
    s.vec[0] = serialize::complex_from_json(jv, path + "." + vkey);
  } else {
    s.vec = serialize::vector_from_json(jv, path + "." + vkey);
  }
  if (j.contains("w") == j.contains("W")) fail(path + ".W", "give exactly one of \"w\" (n = 1) or \"W\"");
  if (j.contains("w")) {
    s.W = CMatrix(1, 1);
    s.W(0, 0) = serialize::complex_from_json(j["w"], path + ".w");
  } else {
    s.W = serialize::matrix_from_json(j["W"], path + ".W");
  }
  try {
    geometry::BallPoint check(s.W);
  } catch (const DomainError& e) {
    fail(path + (j.contains("w") ? ".w" : ".W"), e.what());
  }
  if (s.W.rows() != s.vec.size()) fail(path, "vector and matrix dimensions differ");
  return s;
}

}  // namespace

// ---------------------------------------------------------------- names

const char* method_name(Method m) {
  switch (m) {
    case Method::BerezinDisk: return "berezin-disk";
    case Method::BerezinFC: return "berezin-fc";
    case Method::BerezinBall: return "berezin-ball";
    case Method::WeiNorman: return "wei-norman";
    case Method::RiccatiLinearized: return "riccati-linearized";
    case Method::FockOracle: return "fock-oracle";
    case Method::CompareAll: return "compare-all";
  }
  return "?";
}

Method parse_method(const std::string& name, const std::string& path) {
  for (Method m : {Method::BerezinDisk, Method::BerezinFC, Method::BerezinBall, Method::WeiNorman,
                   Method::RiccatiLinearized, Method::FockOracle, Method::CompareAll}) {
    if (name == method_name(m)) return m;
  }
  fail(path, "unknown method '" + name + "'");
}

const char* chart_name(Chart c) {
  switch (c) {
    case Chart::Jacobi: return "jacobi";
    case Chart::FC: return "fc";
    case Chart::WeiNorman: return "wei-norman";
  }
  return "?";
}

// ---------------------------------------------------------------- schedule

Schedule::Schedule(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw ConfigError("schedule: no segments");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (segments_[i].coeffs.n() != segments_.front().coeffs.n()) throw ConfigError("schedule: mixed dimensions");
    if (i > 0 && !(segments_[i].end > segments_[i - 1].end)) throw ConfigError("schedule: ends must increase");
  }
  segments_.back().end = kInf;
}

Schedule Schedule::constant(const BallCoefficients& c) { return Schedule({Segment{kInf, c}}); }

const BallCoefficients& Schedule::at(Real t) const {
  for (const auto& s : segments_)
    if (t < s.end) return s.coeffs;
  return segments_.back().coeffs;
}

ComplexCoefficients Schedule::disk_at(Real t) const { return to_disk(at(t)); }

std::vector<Real> Schedule::breakpoints(Real t0, Real t1) const {
  std::vector<Real> out;
  for (const auto& s : segments_)
    if (s.end > t0 && s.end < t1) out.push_back(s.end);
  return out;
}

Schedule Schedule::dictionary_image() const {
  std::vector<Segment> out;
  for (const auto& s : segments_)
    out.push_back({s.end, BallCoefficients::from_disk(algebra::conjugation_dictionary(to_disk(s.coeffs)))});
  return Schedule(std::move(out));
}

ComplexCoefficients to_disk(const BallCoefficients& c) {
  if (c.n() != 1) throw DomainError("to_disk: coefficients have n = " + std::to_string(c.n()));
  return {c.eps()[0], c.eps0()(0, 0).real(), c.eps_plus()(0, 0)};
}

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
  grid.validate();
  if (!(k > 0.0) || !std::isfinite(k)) fail("config.k", "must be positive");
  const int n = schedule.n();
  if (initial.vec.size() != n) fail("config.initial", "dimension differs from the coefficients (n = " + std::to_string(n) + ")");
  const bool disk_only = method == Method::BerezinDisk || method == Method::WeiNorman || method == Method::FockOracle;
  if (disk_only && n != 1) fail("config.method", std::string(method_name(method)) + " requires n = 1 coefficients");

  Chart want = Chart::FC;
  bool any_chart = false;
  switch (method) {
    case Method::BerezinDisk:
    case Method::BerezinBall: want = Chart::Jacobi; break;
    case Method::CompareAll: any_chart = true; break;
    default: break;
  }
  if (!any_chart && initial.chart != want)
    fail("config.initial.chart", std::string(method_name(method)) + " starts from the " + chart_name(want) + " chart");

  const bool uses_fock = method == Method::FockOracle || (method == Method::CompareAll && fock.enabled);
  if (uses_fock) {
    if (n != 1) fail("config.fock", "the Fock oracle is one-mode (n = 1)");
    if (k != 0.25) fail("config.k", "the Fock oracle realizes k = 1/4 only");
    if (fock.dim < 2) fail("config.fock.dim", "must be >= 2");
  }
  if (method == Method::CompareAll && integrator != integrate::Method::RK4)
    fail("config.integrator", "compare-all uses fixed-step rk4 so that all methods share one grid");
  if (integrator == integrate::Method::RK45 && !(adaptive.abs_tol > 0.0 && adaptive.rel_tol > 0.0))
    fail("config.adaptive", "tolerances must be positive");
  if (!(tolerances.deviation > 0.0 && tolerances.phase_bridge > 0.0 && tolerances.fidelity > 0.0))
    fail("config.tolerances", "must be positive");
}

ExperimentConfig parse_config(const Json& j, const fs::path& base, const std::string& path) {
  check_keys(j,
             {"name", "method", "k", "coefficients", "schedule", "initial", "grid", "integrator", "adaptive", "fock",
              "tolerances", "output"},
             path);
  ExperimentConfig cfg;
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail(path + ".name", "expected a string");
    cfg.name = j["name"].get<std::string>();
  }
  if (!j.contains("method") || !j["method"].is_string()) fail(path + ".method", "missing or not a string");
  cfg.method = parse_method(j["method"].get<std::string>(), path + ".method");
  if (j.contains("k")) cfg.k = serialize::real_from_json(j["k"], path + ".k");

  if (j.contains("coefficients") == j.contains("schedule"))
    fail(path + ".coefficients", "give exactly one of \"coefficients\" or \"schedule\"");
  cfg.schedule = j.contains("coefficients")
                     ? Schedule::constant(coefficients_from_json(j["coefficients"], path + ".coefficients"))
                     : schedule_from_json(j["schedule"], path + ".schedule");

  if (!j.contains("initial")) fail(path + ".initial", "missing");
  cfg.initial = initial_from_json(j["initial"], path + ".initial");

  if (!j.contains("grid")) fail(path + ".grid", "missing");
  const Json& g = j["grid"];
  check_keys(g, {"t0", "t1", "step"}, path + ".grid");
  if (g.contains("t0")) cfg.grid.t0 = serialize::real_from_json(g["t0"], path + ".grid.t0");
  if (!g.contains("t1")) fail(path + ".grid.t1", "missing");
  cfg.grid.t1 = serialize::real_from_json(g["t1"], path + ".grid.t1");
  if (g.contains("step")) cfg.grid.step = serialize::real_from_json(g["step"], path + ".grid.step");

  if (j.contains("integrator")) {
    const Json& ji = j["integrator"];
    if (ji == "rk4")
      cfg.integrator = integrate::Method::RK4;
    else if (ji == "rk45")
      cfg.integrator = integrate::Method::RK45;
    else
      fail(path + ".integrator", "expected \"rk4\" or \"rk45\"");
  }
  if (j.contains("adaptive")) {
    const Json& a = j["adaptive"];
    check_keys(a, {"abs_tol", "rel_tol"}, path + ".adaptive");
    if (a.contains("abs_tol")) cfg.adaptive.abs_tol = serialize::real_from_json(a["abs_tol"], path + ".adaptive.abs_tol");
    if (a.contains("rel_tol")) cfg.adaptive.rel_tol = serialize::real_from_json(a["rel_tol"], path + ".adaptive.rel_tol");
  }
  if (j.contains("fock")) {
    const Json& f = j["fock"];
    check_keys(f, {"enabled", "dim"}, path + ".fock");
    if (f.contains("enabled")) {
      if (!f["enabled"].is_boolean()) fail(path + ".fock.enabled", "expected a boolean");
      cfg.fock.enabled = f["enabled"].get<bool>();
    }
    if (f.contains("dim")) {
      if (!f["dim"].is_number_integer()) fail(path + ".fock.dim", "expected an integer");
      cfg.fock.dim = f["dim"].get<int>();
    }
  }
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    check_keys(t, {"deviation", "phase_bridge", "fidelity"}, path + ".tolerances");
    if (t.contains("deviation")) cfg.tolerances.deviation = serialize::real_from_json(t["deviation"], path + ".tolerances.deviation");
    if (t.contains("phase_bridge"))
      cfg.tolerances.phase_bridge = serialize::real_from_json(t["phase_bridge"], path + ".tolerances.phase_bridge");
    if (t.contains("fidelity")) cfg.tolerances.fidelity = serialize::real_from_json(t["fidelity"], path + ".tolerances.fidelity");
  }
  if (j.contains("output")) {
    const Json& o = j["output"];
    check_keys(o, {"csv", "report"}, path + ".output");
    auto resolve = [&](const char* key) -> fs::path {
      if (!o.contains(key)) return {};
      if (!o[key].is_string() || o[key].get<std::string>().empty())
        fail(path + ".output." + key, "expected a non-empty path");
      const fs::path p(o[key].get<std::string>());
      return p.is_absolute() ? p : base / p;
    };
    cfg.output.csv = resolve("csv");
    cfg.output.report = resolve("report");
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    // validate() reports paths relative to a single config
    std::string msg = e.what();
    if (path != "config" && msg.rfind("config", 0) == 0) msg = path + msg.substr(6);
    throw ConfigError(msg);
  }
  return cfg;
}

std::vector<ExperimentConfig> parse_batch(const Json& j, const fs::path& base) {
  std::vector<ExperimentConfig> out;
  if (j.is_object() && j.contains("experiments")) {
    check_keys(j, {"experiments"}, "config");
    const Json& list = j["experiments"];
    if (!list.is_array() || list.empty()) fail("config.experiments", "expected a non-empty array");
    for (std::size_t i = 0; i < list.size(); ++i)
      out.push_back(parse_config(list[i], base, "config.experiments[" + std::to_string(i) + "]"));
  } else {
    out.push_back(parse_config(j, base));
  }
  // one writer per output path
  std::set<fs::path> seen;
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const fs::path& p : {out[i].output.csv, out[i].output.report}) {
      if (p.empty()) continue;
      if (!seen.insert(p.lexically_normal()).second)
        fail("config.experiments[" + std::to_string(i) + "].output", "path " + p.string() + " is used twice");
    }
  }
  return out;
}

std::vector<ExperimentConfig> load_config_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string() + ": cannot open");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return parse_batch(j, file.parent_path());
}

// ---------------------------------------------------------------- trajectories

std::pair<CVector, CMatrix> Trajectory::fc_sample(std::size_t i) const {
  if (chart == Chart::Jacobi) return {geometry::fc_inverse(vectors[i], matrices[i]), matrices[i]};
  return {vectors[i], matrices[i]};
}

Real Trajectory::margin_min() const {
  Real m = kInf;
  for (Real x : margin) m = std::min(m, x);
  return m;
}

Real Trajectory::energy_drift() const {
  if (energy.empty() || std::isnan(energy.front())) return kNaN;
  Real d = 0.0;
  for (Real e : energy) d = std::max(d, std::abs(e - energy.front()));
  return d;
}

Trajectory simulate(const ExperimentConfig& cfg, Method method, const Schedule& schedule) {
  const int n = schedule.n();
  switch (method) {
    case Method::BerezinDisk: return simulate_berezin_disk(cfg, schedule, false);
    case Method::BerezinFC:
      return n == 1 ? simulate_berezin_disk(cfg, schedule, true) : simulate_ball(cfg, schedule, true);
    case Method::BerezinBall: return simulate_ball(cfg, schedule, false);
    case Method::WeiNorman: return simulate_wei_norman(cfg, schedule, Method::WeiNorman);
    case Method::RiccatiLinearized: return simulate_linearized(cfg, schedule);
    case Method::FockOracle: return simulate_wei_norman(cfg, schedule, Method::FockOracle);
    case Method::CompareAll: break;
  }
  throw ConfigError("simulate: compare-all is not a single method");
}

Real max_deviation(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) throw Error("max_deviation: trajectories have different lengths");
  Real d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.times[i] != b.times[i]) throw Error("max_deviation: time grids differ");
    const auto [va, Wa] = a.fc_sample(i);
    const auto [vb, Wb] = b.fc_sample(i);
    d = std::max({d, (va - vb).cwiseAbs().maxCoeff(), (Wa - Wb).cwiseAbs().maxCoeff()});
  }
  return d;
}

FockCheck fock_check(const ExperimentConfig& cfg, const Schedule& schedule, const Trajectory& wn) {
  if (wn.chart != Chart::WeiNorman || wn.size() == 0) throw Error("fock_check: needs a Wei-Norman trajectory");
  const fock::OperatorSet ops = fock::build_generators({cfg.fock.dim, fock::Sector::Even});
  const auto& g = cfg.grid;
  fock::StateVector psi = fock::squeezed_state(wn.vectors.front()[0], wn.matrices.front()(0, 0), ops);
  Real a = g.t0;
  std::vector<Real> cuts = schedule.breakpoints(g.t0, g.t1);
  cuts.push_back(g.t1);
  for (Real e : cuts) {
    const CMatrix H = fock::hamiltonian_matrix(schedule.disk_at(0.5 * (a + e)), ops);
    psi = fock::propagate(psi, H, e - a, 0, fock::Propagator::Exponential);
    a = e;
  }
  const std::size_t last = wn.size() - 1;
  const fock::StateVector cs = std::exp(-I_unit * wn.phases[last].phi) *
                               fock::squeezed_state(wn.vectors[last][0], wn.matrices[last](0, 0), ops);
  FockCheck out;
  out.dim = cfg.fock.dim;
  out.tail = std::max(fock::tail_fraction(psi), fock::tail_fraction(cs));
  fock::require_adequate(psi, "fock_check (direct propagation)");
  const Complex overlap = psi.dot(cs);
  out.fidelity = std::abs(overlap);
  out.phase_error = std::abs(std::arg(overlap));
  return out;
}

void write_csv(const Trajectory& tr, std::ostream& out) {
  const int n = tr.n;
  const char* vname = tr.chart == Chart::Jacobi ? "z" : (tr.chart == Chart::FC ? "eta" : "alpha");
  out << "t";
  if (n == 1) {
    out << ",re(" << vname << "),im(" << vname << "),re(w),im(w)";
  } else {
    for (int i = 1; i <= n; ++i) out << ",re(" << vname << "_" << i << "),im(" << vname << "_" << i << ")";
    for (int i = 1; i <= n; ++i)
      for (int j = i; j <= n; ++j) out << ",re(W_" << i << j << "),im(W_" << i << j << ")";
  }
  out << ",phi_D,phi_B,phi,energy,margin\n";
  for (std::size_t s = 0; s < tr.size(); ++s) {
    out << number(tr.times[s]);
    for (int i = 0; i < n; ++i) out << ',' << number(tr.vectors[s][i].real()) << ',' << number(tr.vectors[s][i].imag());
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        out << ',' << number(tr.matrices[s](i, j).real()) << ',' << number(tr.matrices[s](i, j).imag());
    const auto& ph = tr.phases[s];
    out << ',' << number(ph.phi_D) << ',' << number(ph.phi_B) << ',' << number(ph.phi) << ','
        << number(tr.energy[s]) << ',' << number(tr.margin[s]) << '\n';
  }
}

Report run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  Report rep;
  Json& j = rep.json;
  j["name"] = cfg.name;
  j["method"] = method_name(cfg.method);
  j["n"] = cfg.schedule.n();
  j["k"] = cfg.k;
  j["grid"] = Json{{"t0", cfg.grid.t0}, {"t1", cfg.grid.t1}, {"step", cfg.grid.step}};
  j["integrator"] = cfg.integrator == integrate::Method::RK4 ? "rk4" : "rk45";
  j["segments"] = cfg.schedule.segments().size();

  std::vector<std::pair<Trajectory, fs::path>> outputs;

  if (cfg.method != Method::CompareAll) {
    Trajectory tr = simulate(cfg, cfg.method, cfg.schedule);
    const Json summary = trajectory_summary(tr, cfg.schedule.is_constant());
    for (const auto& [key, value] : summary.items()) j[key] = value;
    if (cfg.method == Method::FockOracle) {
      const FockCheck f = fock_check(cfg, cfg.schedule, tr);
      j["fock"] = fock_json(f);
      j["tolerances"] = tolerance_json(cfg.tolerances);
      rep.passed = f.fidelity >= 1.0 - cfg.tolerances.fidelity;
    }
    if (!cfg.output.csv.empty()) j["csv"] = cfg.output.csv.string();
    outputs.emplace_back(std::move(tr), cfg.output.csv);
  } else {
    const int n = cfg.schedule.n();
    std::vector<Trajectory> trs;
    if (n == 1) {
      // Configured coefficients are physical; the coherent-state methods take
      // their dictionary image.
      const Schedule image = cfg.schedule.dictionary_image();
      trs.push_back(simulate(cfg, Method::BerezinDisk, image));
      trs.push_back(simulate(cfg, Method::BerezinFC, image));
      trs.push_back(simulate(cfg, Method::BerezinBall, image));
      trs.push_back(simulate(cfg, Method::RiccatiLinearized, image));
      trs.push_back(simulate(cfg, Method::WeiNorman, cfg.schedule));
    } else {
      trs.push_back(simulate(cfg, Method::BerezinBall, cfg.schedule));
      trs.push_back(simulate(cfg, Method::BerezinFC, cfg.schedule));
      trs.push_back(simulate(cfg, Method::RiccatiLinearized, cfg.schedule));
    }
    j["coefficient_convention"] = n == 1 ? "physical; coherent-state methods use the conjugation-dictionary image"
                                         : "as given";
    Json methods = Json::object();
    for (const auto& tr : trs) {
      Json s = trajectory_summary(tr, cfg.schedule.is_constant());
      if (!cfg.output.csv.empty()) s["csv"] = method_csv(cfg.output.csv, tr.method).string();
      methods[method_name(tr.method)] = std::move(s);
    }
    j["methods"] = std::move(methods);

    Json devs = Json::array();
    Real worst = 0.0;
    Real margin_min = kInf;
    for (std::size_t a = 0; a < trs.size(); ++a) {
      margin_min = std::min(margin_min, trs[a].margin_min());
      for (std::size_t b = a + 1; b < trs.size(); ++b) {
        const Real d = max_deviation(trs[a], trs[b]);
        worst = std::max(worst, d);
        devs.push_back(Json{{"a", method_name(trs[a].method)}, {"b", method_name(trs[b].method)}, {"max", d}});
      }
    }
    j["deviations"] = std::move(devs);
    j["max_deviation"] = worst;
    j["margin_min"] = margin_min;
    j["tolerances"] = tolerance_json(cfg.tolerances);
    rep.passed = worst <= cfg.tolerances.deviation;

    if (n == 1) {
      const Trajectory& wn = trs.back();
      const Trajectory& fc = trs[1];
      // Phases start at zero, so the bridge is checked relative to its t0 value.
      const Real offset = weinorman::phase_bridge(wn.phases[0].phi, fc.phases[0].phi_D, fc.phases[0].phi_B,
                                                  wn.vectors[0][0], wn.matrices[0](0, 0));
      Real residual = 0.0;
      for (std::size_t i = 0; i < wn.size(); ++i) {
        const Real r = weinorman::phase_bridge(wn.phases[i].phi, fc.phases[i].phi_D, fc.phases[i].phi_B,
                                               wn.vectors[i][0], wn.matrices[i](0, 0));
        residual = std::max(residual, std::abs(r - offset));
      }
      j["phase_bridge"] = Json{{"offset", offset}, {"max_residual", residual}};
      rep.passed = rep.passed && residual <= cfg.tolerances.phase_bridge;
      if (cfg.fock.enabled) {
        const FockCheck f = fock_check(cfg, cfg.schedule, wn);
        j["fock"] = fock_json(f);
        rep.passed = rep.passed && f.fidelity >= 1.0 - cfg.tolerances.fidelity;
      }
    }
    for (auto& tr : trs) {
      const fs::path p = cfg.output.csv.empty() ? fs::path{} : method_csv(cfg.output.csv, tr.method);
      outputs.emplace_back(std::move(tr), p);
    }
  }
  j["passed"] = rep.passed;

  for (const auto& [tr, path] : outputs) {
    if (path.empty()) continue;
    write_text(path, [&](std::ostream& out) { write_csv(tr, out); });
  }
  if (!cfg.output.report.empty()) {
    write_text(cfg.output.report, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
  }
  return rep;
}

std::vector<BatchResult> run_batch(const std::vector<ExperimentConfig>& cfgs, int threads) {
  std::vector<BatchResult> results(cfgs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfgs.size(); i = next++) {
      try {
        results[i].report = run_experiment(cfgs[i]);
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        results[i].error = e.what();
        results[i].report.passed = false;
        results[i].report.json = Json{{"name", cfgs[i].name}, {"error", e.what()}};
      }
    }
  };
  const int count = std::clamp<int>(threads, 1, static_cast<int>(std::max<std::size_t>(cfgs.size(), 1)));
  if (count == 1) {
    worker();
    return results;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(count);
  for (int t = 0; t < count; ++t) {
    pool.emplace_back([&, t] {
      try {
        worker();
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

int thread_count_from_env() {
  if (const char* env = std::getenv("JACOBI_THREADS")) {
    int v = 0;
    const std::string s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || v < 1)
      throw ConfigError("JACOBI_THREADS: expected a positive integer, got '" + s + "'");
    return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace jacobi::runner
