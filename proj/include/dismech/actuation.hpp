#pragma once

#include <string>

#include "dismech/springs.hpp"

namespace dismech {

enum class ActuatedQuantity { Kappa1, Kappa2, Twist, RestLength, HingeAngle };

ActuatedQuantity parse_quantity(const std::string& name);
std::string quantity_name(ActuatedQuantity q);

// Springs are indices into the family that carries the quantity: bend-twist
// springs for curvature and twist, stretch springs for rest length, hinge
// springs for the hinge angle.
struct ActuationTarget {
  ActuatedQuantity quantity = ActuatedQuantity::Kappa1;
  std::vector<int> springs;
};

// Piecewise-linear in time, clamped outside the sampled range. Values are
// absolute natural quantities.
struct ActuationSchedule {
  ActuationTarget target;
  std::vector<double> times;
  std::vector<double> values;
};

double evaluate_schedule(const ActuationSchedule& s, double t);
void validate_schedule(const ActuationSchedule& s);

enum class Waveform { Sine, HalfSine };

// value_i(t) = base_i + offset + amplitude * w(2 pi f t + phase_i), with base_i
// the spring's natural value when the actuator was built and phase_i linear
// from phase_start (first listed spring) to phase_end (last).
struct WaveActuation {
  ActuationTarget target;
  Waveform waveform = Waveform::Sine;
  double offset = 0.0;
  double amplitude = 0.0;
  double frequency = 0.0;
  double phase_start = 0.0;
  double phase_end = 0.0;
};

double read_quantity(const SpringSet& s, ActuatedQuantity q, int spring);
void write_quantity(SpringSet& s, ActuatedQuantity q, int spring, double value);

class Actuator {
 public:
  Actuator() = default;
  Actuator(const SpringSet& springs, std::vector<ActuationSchedule> schedules, std::vector<WaveActuation> waves);

  // Overwrites the targeted natural quantities with their values at t.
  void apply(SpringSet& springs, double t) const;

  bool empty() const { return schedules_.empty() && waves_.empty(); }

 private:
  std::vector<ActuationSchedule> schedules_;
  std::vector<WaveActuation> waves_;
  std::vector<std::vector<double>> base_;
};

// CSV with header "time,<tag>,<tag>..." and one row per sample. Each tag
// column becomes one schedule using targets[tag].
std::vector<ActuationSchedule> load_schedule_csv(const std::string& path,
                                                 const std::vector<std::pair<std::string, ActuationTarget>>& targets);

}  // namespace dismech
