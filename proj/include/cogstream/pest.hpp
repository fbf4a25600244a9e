#pragma once

// PEST staircase for estimating a reader's comfortable streaming speed from
// "faster" / "slower" answers.
//
// Each answer moves the speed by delta_v, then delta_v is halved (floored at
// 0.2 WPS) if the answer reversed the previous one. After seven adjustments
// the reader may also accept the current speed.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace cogstream::pest {

enum class Choice { Faster, Slower };

std::string_view to_string(Choice c) noexcept;
// Throws Error{BadInput} for anything but "faster" / "slower".
Choice choice_from_string(std::string_view s);

struct PestConfig {
  double initial_speed_min = 3.0;
  double initial_speed_max = 8.0;
  double initial_delta_v = 2.0;
  double delta_floor = 0.2;
  int same_option_after = 7;
  std::optional<std::uint64_t> rng_seed;
};

struct PestState {
  double current_speed = 0.0;
  double delta_v = 0.0;
  std::optional<Choice> previous_choice;
  int adjustment_count = 0;
  bool converged = false;
  std::optional<double> final_speed;

  // Carried from the config so transitions stay pure.
  double delta_floor = 0.2;
  int same_option_after = 7;

  bool same_allowed() const noexcept {
    return !converged && adjustment_count >= same_option_after;
  }
};

void validate(const PestConfig& config);

// Uniform initial speed from the seeded generator. Without a seed the
// generator is seeded from std::random_device.
PestState start(const PestConfig& config);

// Same as start() but with the initial speed given.
PestState start_at(const PestConfig& config, double initial_speed);

PestState step(const PestState& state, Choice choice);

// "This is the same as my reading speed."
PestState accept_same(const PestState& state);

struct TranscriptEntry {
  int step = 0;
  double speed = 0.0;
  double delta_v = 0.0;
  Choice choice = Choice::Faster;
};

struct ReaderRun {
  double initial_speed = 0.0;
  std::vector<TranscriptEntry> transcript;
  PestState final_state;
};

// Headless staircase against the deterministic reader policy
// "faster iff current speed < true_speed". Runs `steps` adjustments (at least
// same_option_after) and then accepts the current speed.
ReaderRun simulate_reader(const PestConfig& config, double true_speed,
                          int steps = 30);

}  // namespace cogstream::pest
