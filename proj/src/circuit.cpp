#include "ckx/circuit.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "ckx/errors.hpp"

namespace ckx::circuit {

namespace {

constexpr double two_pi = 6.28318530717958647692;
constexpr int ministep_factor = 256;

double clip(double x, double vsat) {
  return std::max(-vsat, std::min(vsat, x));
}

using detail::CachedCoeffs;
using detail::Propagator;

// (1 - exp(-w)) / w, finite at w = 0.
double em1(double w) {
  if (std::fabs(w) < 1e-9) return 1.0 - 0.5 * w;
  return -std::expm1(-w) / w;
}

// Unclipped loop: y' = (-y + G y + [a1 u2, a2 u1]) / tau with
// G = [[0,a1],[a2,0]]; G^2 = (a1 a2) I collapses the matrix exponential to
// two scalars: y(dt) = ec y + eg G y + i1 [a1 u2, a2 u1] + i2 G [a1 u2, a2 u1].
Propagator make_propagator(double a1, double a2, double x) {
  Propagator pr;
  const double e = std::exp(-x);
  pr.e = e;
  pr.xe = x * e;
  const double p = a1 * a2;
  if (std::fabs(p) < 1e-8) {
    pr.ec = e;
    pr.eg = e * x;
    pr.i1 = 1.0 - e;
    pr.i2 = 1.0 - e * (1.0 + x);
  } else if (p > 0.0) {
    const double r = std::sqrt(p);
    pr.ec = e * std::cosh(r * x);
    pr.eg = e * std::sinh(r * x) / r;
    const double f_lo = x * em1((1.0 - r) * x);
    const double f_hi = x * em1((1.0 + r) * x);
    pr.i1 = 0.5 * (f_lo + f_hi);
    pr.i2 = (f_lo - f_hi) / (2.0 * r);
  } else {
    const double r = std::sqrt(-p);
    const double c = std::cos(r * x);
    const double s = std::sin(r * x);
    pr.ec = e * c;
    pr.eg = e * s / r;
    const double d = 1.0 + r * r;
    pr.i1 = (1.0 - e * (c - r * s)) / d;
    pr.i2 = (r - e * (s + r * c)) / (r * d);
  }
  return pr;
}

struct ClipPattern {
  int s1 = 0;  // -1/0/+1; 0 means amp 1 inside the linear range
  int s2 = 0;

  bool operator==(const ClipPattern&) const = default;
};

ClipPattern pattern_of(const CircuitState& st, const GainPair& g,
                       double vsat) {
  const double s1 = g.a1 * (st.y2 + st.u2);
  const double s2 = g.a2 * (st.y1 + st.u1);
  ClipPattern p;
  if (s1 > vsat)
    p.s1 = 1;
  else if (s1 < -vsat)
    p.s1 = -1;
  if (s2 > vsat)
    p.s2 = 1;
  else if (s2 < -vsat)
    p.s2 = -1;
  return p;
}

// One exact sub-step in the clip regime implied by the current state. The
// two expressions are mirror images of each other so that swapping
// (y1,u1,a1) with (y2,u2,a2) commutes with stepping bit-for-bit.
void apply_substep(CircuitState& st, const GainPair& g, const Propagator& pr,
                   double vsat) {
  const double s1 = g.a1 * (st.y2 + st.u2);
  const double s2 = g.a2 * (st.y1 + st.u1);
  const bool c1 = std::fabs(s1) > vsat;
  const bool c2 = std::fabs(s2) > vsat;
  double ny1, ny2;
  if (!c1 && !c2) {
    const double p = g.a1 * g.a2;
    ny1 = pr.ec * st.y1 + pr.eg * g.a1 * st.y2 + g.a1 * pr.i1 * st.u2 +
          p * pr.i2 * st.u1;
    ny2 = pr.ec * st.y2 + pr.eg * g.a2 * st.y1 + g.a2 * pr.i1 * st.u1 +
          p * pr.i2 * st.u2;
  } else if (c1 && c2) {
    const double b1 = s1 > 0.0 ? vsat : -vsat;
    const double b2 = s2 > 0.0 ? vsat : -vsat;
    ny1 = b1 + (st.y1 - b1) * pr.e;
    ny2 = b2 + (st.y2 - b2) * pr.e;
  } else if (c1) {
    const double b1 = s1 > 0.0 ? vsat : -vsat;
    ny1 = b1 + (st.y1 - b1) * pr.e;
    ny2 = pr.e * st.y2 + (1.0 - pr.e) * (g.a2 * (b1 + st.u1)) +
          g.a2 * (st.y1 - b1) * pr.xe;
  } else {
    const double b2 = s2 > 0.0 ? vsat : -vsat;
    ny2 = b2 + (st.y2 - b2) * pr.e;
    ny1 = pr.e * st.y1 + (1.0 - pr.e) * (g.a1 * (b2 + st.u2)) +
          g.a1 * (st.y2 - b2) * pr.xe;
  }
  st.y1 = ny1;
  st.y2 = ny2;
}

// Sub-step with regime-change detection: if the end state implies a
// different clip pattern than the start state, the interval is redone as
// ministep_factor exact pieces, each re-deriving its regime.
void substep_checked(CircuitState& st, const GainPair& g,
                     const Propagator& full, const Propagator& mini,
                     double vsat) {
  const ClipPattern before = pattern_of(st, g, vsat);
  const double y1_0 = st.y1, y2_0 = st.y2;
  apply_substep(st, g, full, vsat);
  if (!(pattern_of(st, g, vsat) == before)) {
    st.y1 = y1_0;
    st.y2 = y2_0;
    for (int i = 0; i < ministep_factor; ++i)
      apply_substep(st, g, mini, vsat);
  }
}

}  // namespace

GainPair GainSchedule::at(double t) const {
  if (!active || t < start_s) return from;
  if (duration_s <= 0.0 || t >= start_s + duration_s) return to;
  const double w = (t - start_s) / duration_s;
  return {from.a1 + (to.a1 - from.a1) * w, from.a2 + (to.a2 - from.a2) * w};
}

std::vector<std::string> CircuitParams::validate(double sample_rate_hz,
                                                 double cutoff_hz) const {
  if (gain_magnitude <= 0.0)
    throw config_error("circuit.gain_magnitude must be positive");
  if (amp_time_constant_s <= 0.0)
    throw config_error("circuit.amp_time_constant_s must be positive");
  if (saturation_volts <= 0.0)
    throw config_error("circuit.saturation_volts must be positive");
  if (internal_oversample < 1)
    throw config_error("circuit.internal_oversample must be >= 1");
  if (switching.kind == ProfileKind::ramp && switching.ramp_duration_s < 0.0)
    throw config_error("circuit.switching.ramp_duration_s must be >= 0");
  if (sample_rate_hz <= 0.0)
    throw config_error("sample_rate_hz must be positive");
  const double dt = 1.0 / (internal_oversample * sample_rate_hz);
  if (dt > amp_time_constant_s / 4.0 * (1.0 + 1e-12))
    throw config_error(
        "circuit.internal_oversample: internal step exceeds "
        "amp_time_constant_s / 4");
  std::vector<std::string> warnings;
  if (cutoff_hz > 0.0) {
    const double noise_time = 1.0 / (two_pi * cutoff_hz);
    if (amp_time_constant_s >= noise_time)
      warnings.push_back(
          "timescale separation lost: amp_time_constant_s is at or above the "
          "noise correlation time, switching transients are no longer "
          "deterministic templates");
  }
  return warnings;
}

void write_csv(const WireTrace& trace, std::ostream& os) {
  os << "t_s,v_ab_volts,v_ba_volts\n";
  char buf[96];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double t =
        trace.start_time_s + static_cast<double>(i) * trace.sample_period_s;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t, trace.v_a[i],
                  trace.v_b[i]);
    os << buf;
  }
}

void step(CircuitState& state, const CircuitParams& params, double u1,
          double u2, double dt) {
  if (dt <= 0.0 || dt > params.amp_time_constant_s / 4.0 * (1.0 + 1e-12))
    throw config_error("step: dt must lie in (0, amp_time_constant_s/4]");
  if (!std::isfinite(state.y1) || !std::isfinite(state.y2) ||
      !std::isfinite(u1) || !std::isfinite(u2))
    throw simulation_fault("step: non-finite state or input");
  state.u1 = u1;
  state.u2 = u2;
  const double x = dt / params.amp_time_constant_s;
  const Propagator full = make_propagator(state.gains.a1, state.gains.a2, x);
  const Propagator mini = make_propagator(state.gains.a1, state.gains.a2,
                                          x / ministep_factor);
  substep_checked(state, state.gains, full, mini, params.saturation_volts);
  state.time_s += dt;
  state.step += 1;
}

GainSchedule set_gains(const CircuitState& state, GainPair target,
                       const SwitchingProfile& profile) {
  GainSchedule sch;
  sch.active = true;
  sch.from = state.gains;
  sch.to = target;
  sch.start_s = state.time_s;
  sch.duration_s =
      profile.kind == ProfileKind::ramp ? profile.ramp_duration_s : 0.0;
  return sch;
}

Simulator::Simulator(const CircuitParams& params, double sample_rate_hz)
    : params_(params), sample_rate_hz_(sample_rate_hz) {
  params_.validate(sample_rate_hz, 0.0);
  dt_ = 1.0 / (params_.internal_oversample * sample_rate_hz_);
}

CircuitState Simulator::initial_state(GainPair gains) const {
  CircuitState st;
  st.gains = gains;
  return st;
}

void Simulator::begin_switch(CircuitState& state, GainPair target) const {
  state.schedule = set_gains(state, target, params_.switching);
}

void Simulator::substep(CircuitState& state) const {
  if (state.schedule.active) {
    state.gains = state.schedule.at(state.time_s);
    if (state.schedule.done(state.time_s)) state.schedule.active = false;
  }
  const GainPair g = state.gains;
  CachedCoeffs* slot = nullptr;
  for (auto& c : cache_) {
    if (c.valid && c.a1 == g.a1 && c.a2 == g.a2) {
      slot = &c;
      break;
    }
  }
  if (slot == nullptr) {
    slot = &cache_[next_slot_++ % cache_size];
    slot->a1 = g.a1;
    slot->a2 = g.a2;
    const double x = dt_ / params_.amp_time_constant_s;
    slot->full = make_propagator(g.a1, g.a2, x);
    slot->mini = make_propagator(g.a1, g.a2, x / ministep_factor);
    slot->valid = true;
  }
  substep_checked(state, g, slot->full, slot->mini, params_.saturation_volts);
  state.step += 1;
  state.time_s = static_cast<double>(state.step) * dt_;
}

void Simulator::run_periods(CircuitState& state, noise::NoiseSource& src1,
                            noise::NoiseSource& src2, std::int64_t n_periods,
                            WireTrace* decimated_out, WireTrace* full_out,
                            std::int64_t full_limit) const {
  const int m = params_.internal_oversample;
  if (state.step % m != 0)
    throw config_error("run_periods: state not at a measurement boundary");
  const double period_s = 1.0 / sample_rate_hz_;
  if (decimated_out != nullptr && decimated_out->size() == 0) {
    decimated_out->sample_period_s = period_s;
    decimated_out->decimated = true;
    decimated_out->start_time_s = state.time_s + period_s;
  }
  for (std::int64_t k = 0; k < n_periods; ++k) {
    state.u1 = src1.next_noise();
    state.u2 = src2.next_noise();
    for (int i = 0; i < m; ++i) {
      substep(state);
      if (full_out != nullptr &&
          (full_limit < 0 ||
           static_cast<std::int64_t>(full_out->size()) < full_limit))
        full_out->push(state.v_a(), state.v_b());
    }
    if (decimated_out != nullptr)
      decimated_out->push(state.v_a(), state.v_b());
    if (!std::isfinite(state.y1) || !std::isfinite(state.y2))
      throw simulation_fault("run_periods: non-finite state at t = " +
                             std::to_string(state.time_s));
  }
}

WireTrace Simulator::run_segment(CircuitState& state,
                                 noise::NoiseSource& src1,
                                 noise::NoiseSource& src2, double duration_s,
                                 bool decimated) const {
  if (duration_s <= 0.0) throw config_error("run_segment: duration must be > 0");
  const int m = params_.internal_oversample;
  const std::int64_t n_steps =
      std::llround(duration_s * sample_rate_hz_ * m);
  WireTrace trace;
  trace.decimated = decimated;
  trace.sample_period_s = decimated ? 1.0 / sample_rate_hz_ : dt_;
  trace.start_time_s = state.time_s + trace.sample_period_s;
  for (std::int64_t i = 0; i < n_steps; ++i) {
    if (state.step % m == 0) {
      state.u1 = src1.next_noise();
      state.u2 = src2.next_noise();
    }
    substep(state);
    if (!decimated)
      trace.push(state.v_a(), state.v_b());
    else if (state.step % m == 0)
      trace.push(state.v_a(), state.v_b());
  }
  if (!std::isfinite(state.y1) || !std::isfinite(state.y2))
    throw simulation_fault("run_segment: non-finite state");
  return trace;
}

WireTrace Simulator::frozen_transient(double v_a0, double v_b0, GainPair pre,
                                      GainPair post, int k_samples) const {
  if (k_samples < 1)
    throw config_error("frozen_transient: k_samples must be >= 1");
  const double vsat = params_.saturation_volts;
  CircuitState st;
  st.gains = pre;
  st.y1 = clip(pre.a1 * v_b0, vsat);
  st.u1 = v_a0 - st.y1;
  st.y2 = clip(pre.a2 * v_a0, vsat);
  st.u2 = v_b0 - st.y2;
  st.schedule = set_gains(st, post, params_.switching);
  WireTrace trace;
  trace.decimated = false;
  trace.sample_period_s = dt_;
  trace.start_time_s = 0.0;
  trace.push(v_a0, v_b0);
  for (int i = 1; i < k_samples; ++i) {
    substep(st);
    trace.push(st.v_a(), st.v_b());
  }
  return trace;
}

}  // namespace ckx::circuit
