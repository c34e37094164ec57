#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rfcrn/config.hpp"
#include "rfcrn/core.hpp"

namespace rfcrn {

enum class DistFamily { fixed, normal_truncated, lognormal, bursty_two_state };

/// A positive random quantity described by its mean and standard deviation.
/// bursty-two-state is a balanced two-phase hyperexponential and needs
/// spread >= mean; spread == mean gives an exponential.
struct DistSpec {
    DistFamily family = DistFamily::fixed;
    double mean = 1.0;
    double spread = 0.0;

    /// Throws ValidationError(field, ...) on a non-positive mean, negative spread,
    /// or a bursty spread below the mean.
    void validate(const std::string& field) const;
    double sample(std::mt19937_64& rng) const;

    /// "fixed 160", "normal 500 120", "lognormal 0.1 0.02", "bursty 0.2 0.4";
    /// values may carry unit suffixes.
    static DistSpec parse(const std::string& text, const std::string& field);
};

std::string to_string(DistFamily f);

struct TrafficProfile {
    std::string name;
    DistSpec length;        ///< bytes
    DistSpec interarrival;  ///< seconds
    double bitrate = 1e6;   ///< bits/s while a packet occupies the channel

    void validate() const;
};

/// Profiles declared as profile.<name>.{length,interarrival,bitrate}, in name order.
std::vector<TrafficProfile> profiles_from(const Config& cfg);

struct Packet {
    double time = 0.0;    ///< arrival, s
    double length = 0.0;  ///< bytes
};

struct PacketTrace {
    int subchannel_id = 0;
    double duration = 0.0;  ///< observation window [0, duration)
    std::vector<Packet> packets;
};

/// Renewal arrivals with profile interarrivals; lengths rounded to whole bytes (>= 1).
PacketTrace generate_trace(const TrafficProfile& profile, double duration, std::uint64_t seed,
                           int subchannel_id = 0);

/// N x 3 rows [length, interarrival, population variance of lengths 1..n].
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// Throws ValidationError on an empty trace.
FeatureMatrix extract_features(const PacketTrace& trace);

struct ChannelStats {
    double lambda = 0.0;  ///< packets per second
    double p_i = 1.0;     ///< idle slot fraction
    double p_o = 0.0;     ///< busy slot fraction
    long long slots = 0;
};

/// A slot is busy when any transmission [t, t + 8 length / bitrate) overlaps it.
ChannelStats estimate_channel_stats(const PacketTrace& trace, double slot, double bitrate);

/// Feature rows drawn from synthetic traces, with ground-truth profile labels.
struct LabeledFeatures {
    FeatureMatrix x;
    std::vector<int> label;       ///< index into the profile list
    std::vector<int> subchannel;  ///< trace the row came from
};

/// n_points rows split evenly over the profiles (earlier profiles take the
/// remainder). Each trace contributes `per_trace` consecutive rows after
/// skipping `warmup` packets; per_trace = 0 puts a profile's rows in one trace.
LabeledFeatures sample_feature_points(const std::vector<TrafficProfile>& profiles, int n_points,
                                      int warmup, std::uint64_t seed, int per_trace = 0);

/// CSV with header "time_s,length_bytes". Rows are sorted by time; duration is
/// the last arrival time. Throws std::runtime_error("<path>:<line>: ...") on
/// malformed input, non-positive lengths, negative or repeated times.
PacketTrace ingest_trace(const std::filesystem::path& path, int subchannel_id = 0);

}  // namespace rfcrn
