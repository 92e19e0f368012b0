#include "dismech/actuation.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace dismech {

ActuatedQuantity parse_quantity(const std::string& name) {
  if (name == "kappa1") return ActuatedQuantity::Kappa1;
  if (name == "kappa2") return ActuatedQuantity::Kappa2;
  if (name == "twist") return ActuatedQuantity::Twist;
  if (name == "length") return ActuatedQuantity::RestLength;
  if (name == "hinge") return ActuatedQuantity::HingeAngle;
  throw std::invalid_argument("unknown actuated quantity '" + name + "'");
}

std::string quantity_name(ActuatedQuantity q) {
  switch (q) {
    case ActuatedQuantity::Kappa1: return "kappa1";
    case ActuatedQuantity::Kappa2: return "kappa2";
    case ActuatedQuantity::Twist: return "twist";
    case ActuatedQuantity::RestLength: return "length";
    case ActuatedQuantity::HingeAngle: return "hinge";
  }
  return "";
}

void validate_schedule(const ActuationSchedule& s) {
  if (s.times.empty()) throw std::invalid_argument("empty actuation schedule");
  if (s.times.size() != s.values.size()) throw std::invalid_argument("schedule times and values differ in length");
  for (std::size_t i = 1; i < s.times.size(); ++i)
    if (!(s.times[i] > s.times[i - 1])) throw std::invalid_argument("schedule times must be strictly increasing");
  if (s.target.quantity == ActuatedQuantity::RestLength)
    for (double v : s.values)
      if (!(v > 0.0)) throw std::invalid_argument("natural length samples must be positive");
}

double evaluate_schedule(const ActuationSchedule& s, double t) {
  if (s.times.empty()) throw std::invalid_argument("empty actuation schedule");
  if (t <= s.times.front()) return s.values.front();
  if (t >= s.times.back()) return s.values.back();
  const auto it = std::upper_bound(s.times.begin(), s.times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - s.times.begin());
  const double w = (t - s.times[i - 1]) / (s.times[i] - s.times[i - 1]);
  return (1.0 - w) * s.values[i - 1] + w * s.values[i];
}

double read_quantity(const SpringSet& s, ActuatedQuantity q, int i) {
  switch (q) {
    case ActuatedQuantity::Kappa1: return s.bendtwist.at(i).kappa_bar[0];
    case ActuatedQuantity::Kappa2: return s.bendtwist.at(i).kappa_bar[1];
    case ActuatedQuantity::Twist: return s.bendtwist.at(i).twist_bar;
    case ActuatedQuantity::RestLength: return s.stretch.at(i).rest_length;
    case ActuatedQuantity::HingeAngle: return s.hinges.at(i).phi_bar;
  }
  return 0.0;
}

void write_quantity(SpringSet& s, ActuatedQuantity q, int i, double v) {
  switch (q) {
    case ActuatedQuantity::Kappa1: s.bendtwist.at(i).kappa_bar[0] = v; break;
    case ActuatedQuantity::Kappa2: s.bendtwist.at(i).kappa_bar[1] = v; break;
    case ActuatedQuantity::Twist: s.bendtwist.at(i).twist_bar = v; break;
    case ActuatedQuantity::RestLength:
      if (!(v > 0.0)) throw std::invalid_argument("non-positive natural length from actuation");
      s.stretch.at(i).rest_length = v;
      break;
    case ActuatedQuantity::HingeAngle: s.hinges.at(i).phi_bar = v; break;
  }
}

Actuator::Actuator(const SpringSet& springs, std::vector<ActuationSchedule> schedules, std::vector<WaveActuation> waves)
    : schedules_(std::move(schedules)), waves_(std::move(waves)) {
  for (const auto& s : schedules_) {
    validate_schedule(s);
    for (int i : s.target.springs) read_quantity(springs, s.target.quantity, i);
  }
  for (const auto& w : waves_) {
    std::vector<double> base;
    for (int i : w.target.springs) base.push_back(read_quantity(springs, w.target.quantity, i));
    base_.push_back(std::move(base));
  }
}

void Actuator::apply(SpringSet& springs, double t) const {
  for (const auto& s : schedules_) {
    const double v = evaluate_schedule(s, t);
    for (int i : s.target.springs) write_quantity(springs, s.target.quantity, i, v);
  }
  for (std::size_t k = 0; k < waves_.size(); ++k) {
    const WaveActuation& w = waves_[k];
    const std::size_t n = w.target.springs.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double frac = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
      const double phase = w.phase_start + (w.phase_end - w.phase_start) * frac;
      double s = std::sin(2.0 * M_PI * w.frequency * t + phase);
      if (w.waveform == Waveform::HalfSine) s = std::max(0.0, s);
      write_quantity(springs, w.target.quantity, w.target.springs[i], base_[k][i] + w.offset + w.amplitude * s);
    }
  }
}

std::vector<ActuationSchedule> load_schedule_csv(const std::string& path,
                                                 const std::vector<std::pair<std::string, ActuationTarget>>& targets) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open actuation file " + path);
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return out;
  };
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header");
  const auto header = split(line);
  if (header.empty() || header[0] != "time") throw std::runtime_error(path + ": header must start with 'time'");
  std::vector<ActuationSchedule> out;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto it = std::find_if(targets.begin(), targets.end(), [&](const auto& p) { return p.first == header[c]; });
    if (it == targets.end()) throw std::runtime_error(path + ": no target for column '" + header[c] + "'");
    ActuationSchedule s;
    s.target = it->second;
    out.push_back(s);
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                               " columns");
    try {
      const double t = std::stod(cells[0]);
      for (std::size_t c = 1; c < cells.size(); ++c) {
        out[c - 1].times.push_back(t);
        out[c - 1].values.push_back(std::stod(cells[c]));
      }
    } catch (const std::logic_error&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  for (const auto& s : out) validate_schedule(s);
  return out;
}

}  // namespace dismech
