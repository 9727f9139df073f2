#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ckx/noise.hpp"

namespace ckx::circuit {

struct GainPair {
  double a1 = 0.0;  // Alice's amplifier gain
  double a2 = 0.0;  // Bob's amplifier gain
};

// First-order loop is stable iff the gain product stays below 1.
inline bool stable(const GainPair& g) { return g.a1 * g.a2 < 1.0; }

enum class ProfileKind { step, ramp };

struct SwitchingProfile {
  ProfileKind kind = ProfileKind::step;
  double ramp_duration_s = 0.0;
};

struct CircuitParams {
  double gain_magnitude = 5.0;
  double amp_time_constant_s = 1e-6;
  double saturation_volts = 15.0;
  int internal_oversample = 16;  // internal steps per measurement period
  SwitchingProfile switching{};

  // Throws config_error on hard violations; returns soft warnings.
  std::vector<std::string> validate(double sample_rate_hz,
                                    double cutoff_hz) const;
};

// Pending linear gain interpolation; a zero-duration ramp and a step change
// both take effect at the first sub-step at or after start_s.
struct GainSchedule {
  bool active = false;
  GainPair from{}, to{};
  double start_s = 0.0;
  double duration_s = 0.0;

  GainPair at(double t) const;
  bool done(double t) const { return t >= start_s + duration_s; }
};

struct CircuitState {
  double y1 = 0.0, y2 = 0.0;  // amplifier outputs, clamped to the rails
  double u1 = 0.0, u2 = 0.0;  // held noise samples (zero-order hold)
  GainPair gains{};
  GainSchedule schedule{};
  std::int64_t step = 0;  // internal sub-steps taken since t = 0
  double time_s = 0.0;

  double v_a() const { return y1 + u1; }
  double v_b() const { return y2 + u2; }
};

struct WireTrace {
  double start_time_s = 0.0;
  double sample_period_s = 0.0;
  bool decimated = false;  // true: measurement-rate samples, false: internal
  std::vector<double> v_a, v_b;

  std::size_t size() const { return v_a.size(); }
  void push(double a, double b) {
    v_a.push_back(a);
    v_b.push_back(b);
  }
};

// Header `t_s,v_ab_volts,v_ba_volts`, one row per sample.
void write_csv(const WireTrace& trace, std::ostream& os);

namespace detail {

// Exact per-sub-step propagation constants for fixed gains, see circuit.cpp.
struct Propagator {
  double e = 0.0;
  double xe = 0.0;
  double ec = 0.0, eg = 0.0, i1 = 0.0, i2 = 0.0;
};

struct CachedCoeffs {
  double a1 = 0.0, a2 = 0.0;
  bool valid = false;
  Propagator full, mini;
};

}  // namespace detail

// One synchronous update over dt with explicitly supplied held noise.
// Exact propagation of the saturating two-amplifier loop within the current
// clip regime; regime changes detected at the sub-step end trigger a finer
// redo. Requires dt <= amp_time_constant_s / 4.
void step(CircuitState& state, const CircuitParams& params, double u1,
          double u2, double dt);

// Returns the schedule a state should adopt to move to `target` under the
// given profile, anchored at the state's current time.
GainSchedule set_gains(const CircuitState& state, GainPair target,
                       const SwitchingProfile& profile);

class Simulator {
 public:
  Simulator(const CircuitParams& params, double sample_rate_hz);

  const CircuitParams& params() const { return params_; }
  double sample_rate_hz() const { return sample_rate_hz_; }
  double dt() const { return dt_; }
  int oversample() const { return params_.internal_oversample; }

  CircuitState initial_state(GainPair gains) const;

  // Installs a switch to `target` at the state's current time using the
  // configured switching profile.
  void begin_switch(CircuitState& state, GainPair target) const;

  // One internal sub-step with the state's held noise.
  void substep(CircuitState& state) const;

  // Advances n_periods whole measurement periods, drawing one sample per
  // period from each source and holding it across the sub-steps. Appends
  // end-of-period samples to `decimated_out` and every internal sample to
  // `full_out` (until it holds full_limit samples; negative = no limit).
  void run_periods(CircuitState& state, noise::NoiseSource& src1,
                   noise::NoiseSource& src2, std::int64_t n_periods,
                   WireTrace* decimated_out, WireTrace* full_out,
                   std::int64_t full_limit = -1) const;

  // Advances round(duration * rate * oversample) internal steps.
  WireTrace run_segment(CircuitState& state, noise::NoiseSource& src1,
                        noise::NoiseSource& src2, double duration_s,
                        bool decimated) const;

  // Deterministic switching trajectory from initial wire voltages, noise
  // frozen at the values implied by pre-switch steady consistency:
  // y_i = clip(a_i * v_other), u_i = v_own - y_i. trajectory[0] is exactly
  // (v_a0, v_b0); the switch happens at trajectory index 0.
  WireTrace frozen_transient(double v_a0, double v_b0, GainPair pre,
                             GainPair post, int k_samples) const;

 private:
  static constexpr unsigned cache_size = 8;

  CircuitParams params_;
  double sample_rate_hz_;
  double dt_;
  mutable detail::CachedCoeffs cache_[cache_size]{};
  mutable unsigned next_slot_ = 0;
};

}  // namespace ckx::circuit
