#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "jacobi/algebra.hpp"
#include "jacobi/berezin.hpp"
#include "jacobi/integrate.hpp"
#include "jacobi/serialize.hpp"

/// Experiment configuration, trajectory generation for every method,
/// cross-method comparison and report output.
namespace jacobi::runner {

using algebra::BallCoefficients;
using algebra::ComplexCoefficients;
using serialize::Json;

inline constexpr Real kNaN = std::numeric_limits<Real>::quiet_NaN();

enum class Method { BerezinDisk, BerezinFC, BerezinBall, WeiNorman, RiccatiLinearized, FockOracle, CompareAll };

const char* method_name(Method m);
/// Throws ConfigError naming `path` for an unknown selector.
Method parse_method(const std::string& name, const std::string& path);

/// (z, W), (eta, W) or the Wei-Norman canonical chart (alpha, w), alpha = eta.
enum class Chart { Jacobi, FC, WeiNorman };

const char* chart_name(Chart c);

/// A Hamiltonian in force until `end` (exclusive).
struct Segment {
  Real end;
  BallCoefficients coeffs;
};

/// Piecewise-constant coefficients. The last segment extends to +infinity.
class Schedule {
 public:
  explicit Schedule(std::vector<Segment> segments);
  static Schedule constant(const BallCoefficients& c);
  static Schedule constant(const ComplexCoefficients& c) { return constant(BallCoefficients::from_disk(c)); }

  int n() const { return segments_.front().coeffs.n(); }
  bool is_constant() const { return segments_.size() == 1; }
  const std::vector<Segment>& segments() const { return segments_; }

  /// Coefficients in force at t (the segment with t < end).
  const BallCoefficients& at(Real t) const;
  /// Same, as n = 1 coefficients.
  ComplexCoefficients disk_at(Real t) const;
  /// Segment ends strictly inside (t0, t1).
  std::vector<Real> breakpoints(Real t0, Real t1) const;

  /// The schedule with `algebra::conjugation_dictionary` applied to every
  /// segment (n = 1 only).
  Schedule dictionary_image() const;

 private:
  std::vector<Segment> segments_;
};

/// Reads the n = 1 coefficients of a 1 x 1 ball coefficient set.
ComplexCoefficients to_disk(const BallCoefficients& c);

struct InitialState {
  Chart chart = Chart::FC;
  /// z or eta.
  CVector vec;
  CMatrix W;
};

struct Tolerances {
  Real deviation = 1e-8;
  Real phase_bridge = 1e-6;
  /// Allowed 1 - fidelity.
  Real fidelity = 1e-6;
};

struct FockOptions {
  bool enabled = false;
  int dim = 200;
};

struct OutputPaths {
  std::filesystem::path csv;
  std::filesystem::path report;
};

struct ExperimentConfig {
  std::string name = "experiment";
  Method method = Method::CompareAll;
  Schedule schedule = Schedule::constant(ComplexCoefficients{});
  InitialState initial;
  Real k = 0.25;
  integrate::TimeGrid grid;
  integrate::Method integrator = integrate::Method::RK4;
  integrate::AdaptiveOptions adaptive;
  FockOptions fock;
  Tolerances tolerances;
  OutputPaths output;

  /// Cross-field checks; throws ConfigError with the field path.
  void validate() const;
};

/// Parses one experiment object. Relative output paths resolve against `base`.
ExperimentConfig parse_config(const Json& j, const std::filesystem::path& base = {},
                              const std::string& path = "config");

/// A single experiment object or {"experiments": [...]}.
std::vector<ExperimentConfig> parse_batch(const Json& j, const std::filesystem::path& base = {});

/// Reads and parses a JSON file; syntax errors become ConfigError.
std::vector<ExperimentConfig> load_config_file(const std::filesystem::path& file);

struct Trajectory {
  Method method = Method::BerezinFC;
  Chart chart = Chart::FC;
  int n = 1;
  std::vector<Real> times;
  std::vector<CVector> vectors;
  std::vector<CMatrix> matrices;
  /// NaN where the method does not define a phase.
  std::vector<berezin::PhaseRecord> phases;
  std::vector<Real> energy;
  std::vector<Real> margin;
  /// Largest quasienergy residual along a Wei-Norman trajectory (NaN otherwise).
  Real quasienergy_residual = kNaN;

  std::size_t size() const { return times.size(); }
  /// Sample i in the (eta, W) chart.
  std::pair<CVector, CMatrix> fc_sample(std::size_t i) const;
  Real margin_min() const;
  /// max |E(t) - E(t0)|; NaN when the energy is undefined.
  Real energy_drift() const;
};

/// Integrates one method with the coefficients exactly as given (no
/// dictionary). Chart invariants are checked at every sample; a violation
/// throws DomainError naming the time.
Trajectory simulate(const ExperimentConfig& cfg, Method method, const Schedule& schedule);

/// max over samples of the largest entry-wise |difference| in the FC chart.
/// Symmetric; both trajectories must share the time grid.
Real max_deviation(const Trajectory& a, const Trajectory& b);

struct FockCheck {
  int dim = 0;
  Real fidelity = 0.0;
  Real phase_error = 0.0;
  Real tail = 0.0;
};

/// Direct truncated-Fock propagation of T(alpha0, w0)|0> under the schedule
/// (one matrix exponential per segment) compared with exp(-i phi) T(alpha, w)|0>
/// at the end of a Wei-Norman trajectory.
FockCheck fock_check(const ExperimentConfig& cfg, const Schedule& schedule, const Trajectory& wn);

/// t, re/im of the chart entries, phi_D, phi_B, phi, energy, margin.
void write_csv(const Trajectory& tr, std::ostream& out);

struct Report {
  Json json;
  /// Tolerances met (always true for single-method runs).
  bool passed = true;
};

/// Runs the experiment, writes the configured CSV/JSON outputs and returns
/// the report. In compare-all mode the configured coefficients are the
/// physical Hamiltonian: Wei-Norman and the Fock oracle use them directly,
/// the coherent-state methods receive their dictionary image.
Report run_experiment(const ExperimentConfig& cfg);

struct BatchResult {
  Report report;
  /// Empty on success, otherwise the numerical error that aborted the run.
  std::string error;
};

/// Runs independent experiments on `threads` workers; results keep input order.
std::vector<BatchResult> run_batch(const std::vector<ExperimentConfig>& cfgs, int threads);

/// Worker count from JACOBI_THREADS (default: hardware concurrency, at least 1).
int thread_count_from_env();

}  // namespace jacobi::runner
