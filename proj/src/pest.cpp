#include "cogstream/pest.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "cogstream/error.hpp"

namespace cogstream::pest {

std::string_view to_string(Choice c) noexcept {
  return c == Choice::Faster ? "faster" : "slower";
}

Choice choice_from_string(std::string_view s) {
  if (s == "faster") return Choice::Faster;
  if (s == "slower") return Choice::Slower;
  throw Error(Errc::BadInput, "choice must be 'faster' or 'slower'");
}

void validate(const PestConfig& c) {
  const bool ok = c.initial_speed_min > 0.0 &&
                  c.initial_speed_min < c.initial_speed_max &&
                  std::isfinite(c.initial_speed_max) &&
                  c.initial_delta_v > 0.0 && c.delta_floor > 0.0 &&
                  c.initial_delta_v >= c.delta_floor &&
                  c.same_option_after >= 0;
  if (!ok) throw Error(Errc::BadConfig, "invalid PEST configuration");
}

PestState start_at(const PestConfig& config, double initial_speed) {
  validate(config);
  if (!(initial_speed > 0.0)) {
    throw Error(Errc::BadConfig, "initial speed must be positive");
  }
  PestState s;
  s.current_speed = initial_speed;
  s.delta_v = config.initial_delta_v;
  s.delta_floor = config.delta_floor;
  s.same_option_after = config.same_option_after;
  return s;
}

PestState start(const PestConfig& config) {
  validate(config);
  const std::uint64_t seed =
      config.rng_seed ? *config.rng_seed
                      : (std::uint64_t{std::random_device{}()} << 32) ^
                            std::random_device{}();
  std::mt19937_64 gen(seed);
  // 53 random bits -> [0, 1); fixed arithmetic so the draw is portable.
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  const double speed = config.initial_speed_min +
                       u * (config.initial_speed_max - config.initial_speed_min);
  return start_at(config, speed);
}

PestState step(const PestState& state, Choice choice) {
  if (state.converged) {
    throw Error(Errc::AlreadyConverged, "staircase already converged");
  }
  PestState next = state;
  if (choice == Choice::Faster) {
    next.current_speed = state.current_speed + state.delta_v;
  } else {
    next.current_speed =
        std::max(state.current_speed - state.delta_v, state.delta_floor);
  }
  const bool reversal =
      state.previous_choice.has_value() && *state.previous_choice != choice;
  if (reversal) {
    next.delta_v = std::max(state.delta_v / 2.0, state.delta_floor);
  }
  next.previous_choice = choice;
  ++next.adjustment_count;
  return next;
}

PestState accept_same(const PestState& state) {
  if (state.converged) {
    throw Error(Errc::AlreadyConverged, "staircase already converged");
  }
  if (state.adjustment_count < state.same_option_after) {
    throw Error(Errc::TooEarly,
                "'same' is offered only after " +
                    std::to_string(state.same_option_after) + " adjustments");
  }
  PestState next = state;
  next.converged = true;
  next.final_speed = state.current_speed;
  return next;
}

ReaderRun simulate_reader(const PestConfig& config, double true_speed,
                          int steps) {
  if (!(true_speed > 0.0)) {
    throw Error(Errc::BadInput, "true speed must be positive");
  }
  ReaderRun run;
  PestState s = start(config);
  run.initial_speed = s.current_speed;
  steps = std::max(steps, s.same_option_after);
  for (int i = 0; i < steps; ++i) {
    const Choice c =
        s.current_speed < true_speed ? Choice::Faster : Choice::Slower;
    s = step(s, c);
    run.transcript.push_back(
        TranscriptEntry{s.adjustment_count, s.current_speed, s.delta_v, c});
  }
  run.final_state = accept_same(s);
  return run;
}

}  // namespace cogstream::pest
