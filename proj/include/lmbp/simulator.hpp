#pragma once

#include "lmbp/models.hpp"
#include "lmbp/types.hpp"

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace lmbp {

enum class ScenarioStyle { ts1, ts2 };

[[nodiscard]] ScenarioStyle parse_scenario_style(const std::string& name);
[[nodiscard]] std::string to_string(ScenarioStyle style);

struct ScenarioConfig {
    ScenarioStyle style = ScenarioStyle::ts1;
    int object_count = 10;
    int appear_min = 1;
    int appear_max = 40;
    int disappear_after = 150;
    int total_steps = 200;
    /// TS2: step at which all objects meet near the origin.
    int rendezvous = 120;
    /// TS2: radius of the disk around the origin holding the meeting positions.
    double rendezvous_spread = 5.0;
    /// TS2: cap on the initial distance from the origin and on the speed.
    double ts2_max_distance = 200.0;
    double ts2_max_speed = 1.5;
    /// Velocity prior of TS1 objects.
    double velocity_sigma = 0.5;

    MotionModel motion = make_ncv_motion(0.01, 1.0);
    SensorModel sensor;
    ClutterModel clutter;

    void validate() const;
};

/// One object, alive for steps birth..death inclusive.
struct ObjectTrajectory {
    int birth = 0;
    int death = 0;
    std::vector<State> states;

    [[nodiscard]] bool alive(int k) const { return k >= birth && k <= death; }
    [[nodiscard]] const State& at(int k) const { return states.at(static_cast<std::size_t>(k - birth)); }
};

struct GroundTruth {
    std::vector<ObjectTrajectory> objects;

    /// States of all objects alive at step k, in object order.
    [[nodiscard]] std::vector<State> alive_states(int k) const;
};

[[nodiscard]] GroundTruth generate_truth(const ScenarioConfig& config, Rng& rng);

/// Detections of `states` (p_D thinning, objects beyond max range never
/// detected) plus Poisson clutter, in random order.
[[nodiscard]] MeasurementFrame generate_frame(std::span<const State> states, const SensorModel& sensor,
                                              const ClutterModel& clutter, Rng& rng);

/// `object_id,k,x1,x2,v1,v2`, one row per object and alive step.
void write_truth_csv(std::ostream& os, const GroundTruth& truth);

/// `k,range,bearing`; frames[i] belongs to step i + 1.
void write_frames_csv(std::ostream& os, std::span<const MeasurementFrame> frames);

}  // namespace lmbp
