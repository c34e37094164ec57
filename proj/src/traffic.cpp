#include "rfcrn/traffic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rfcrn {

namespace {

std::vector<std::string> split_ws(const std::string& text)
{
    std::istringstream in(text);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) {
        out.push_back(tok);
    }
    return out;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

std::string to_string(DistFamily f)
{
    switch (f) {
    case DistFamily::fixed: return "fixed";
    case DistFamily::normal_truncated: return "normal-truncated";
    case DistFamily::lognormal: return "lognormal";
    case DistFamily::bursty_two_state: return "bursty-two-state";
    }
    return "?";
}

void DistSpec::validate(const std::string& field) const
{
    if (!(std::isfinite(mean) && mean > 0.0)) {
        throw ValidationError(field, "mean must be > 0");
    }
    if (!(std::isfinite(spread) && spread >= 0.0)) {
        throw ValidationError(field, "spread must be >= 0");
    }
    if (family == DistFamily::bursty_two_state && spread < mean) {
        throw ValidationError(field, "bursty-two-state needs spread >= mean");
    }
}

double DistSpec::sample(std::mt19937_64& rng) const
{
    switch (family) {
    case DistFamily::fixed:
        return mean;
    case DistFamily::normal_truncated: {
        if (spread == 0.0) {
            return mean;
        }
        std::normal_distribution<double> d(mean, spread);
        for (int tries = 0; tries < 1000; ++tries) {
            if (const double x = d(rng); x > 0.0) {
                return x;
            }
        }
        return mean;
    }
    case DistFamily::lognormal: {
        if (spread == 0.0) {
            return mean;
        }
        const double s2 = std::log1p((spread * spread) / (mean * mean));
        std::lognormal_distribution<double> d(std::log(mean) - 0.5 * s2, std::sqrt(s2));
        return d(rng);
    }
    case DistFamily::bursty_two_state: {
        const double c2 = (spread * spread) / (mean * mean);
        const double p1 = 0.5 * (1.0 + std::sqrt((c2 - 1.0) / (c2 + 1.0)));
        std::uniform_real_distribution<double> pick(0.0, 1.0);
        const double p = pick(rng) < p1 ? p1 : 1.0 - p1;
        std::exponential_distribution<double> d(2.0 * p / mean);
        return d(rng);
    }
    }
    return mean;
}

DistSpec DistSpec::parse(const std::string& text, const std::string& field)
{
    const auto tok = split_ws(text);
    if (tok.empty()) {
        throw ValidationError(field, "empty distribution spec");
    }
    DistSpec d;
    const std::string& fam = tok[0];
    if (fam == "fixed") {
        d.family = DistFamily::fixed;
    } else if (fam == "normal" || fam == "normal-truncated") {
        d.family = DistFamily::normal_truncated;
    } else if (fam == "lognormal") {
        d.family = DistFamily::lognormal;
    } else if (fam == "bursty" || fam == "bursty-two-state") {
        d.family = DistFamily::bursty_two_state;
    } else {
        throw ValidationError(field, "unknown distribution family '" + fam + "'");
    }
    const std::size_t want = d.family == DistFamily::fixed ? 2 : 3;
    if (tok.size() != want) {
        throw ValidationError(field, "expected '" + fam + (want == 2 ? " MEAN'" : " MEAN SPREAD'"));
    }
    d.mean = parse_quantity(tok[1], field);
    d.spread = want == 3 ? parse_quantity(tok[2], field) : 0.0;
    d.validate(field);
    return d;
}

void TrafficProfile::validate() const
{
    length.validate("profile." + name + ".length");
    interarrival.validate("profile." + name + ".interarrival");
    if (!(std::isfinite(bitrate) && bitrate > 0.0)) {
        throw ValidationError("profile." + name + ".bitrate", "must be > 0");
    }
}

std::vector<TrafficProfile> profiles_from(const Config& cfg)
{
    std::vector<std::string> names;
    for (const auto& key : cfg.subkeys("profile")) {
        const auto dot = key.find('.');
        const std::string name = key.substr(0, dot);
        if (std::find(names.begin(), names.end(), name) == names.end()) {
            names.push_back(name);
        }
    }
    std::vector<TrafficProfile> out;
    for (const auto& name : names) {
        const std::string base = "profile." + name + ".";
        TrafficProfile p;
        p.name = name;
        p.length = DistSpec::parse(cfg.get_string(base + "length"), base + "length");
        p.interarrival =
            DistSpec::parse(cfg.get_string(base + "interarrival"), base + "interarrival");
        p.bitrate = cfg.get_double(base + "bitrate", 1e6);
        p.validate();
        out.push_back(std::move(p));
    }
    return out;
}

PacketTrace generate_trace(const TrafficProfile& profile, double duration, std::uint64_t seed,
                           int subchannel_id)
{
    profile.validate();
    if (!(duration >= 0.0)) {
        throw ValidationError("duration", "must be >= 0");
    }
    PacketTrace trace;
    trace.subchannel_id = subchannel_id;
    trace.duration = duration;
    std::mt19937_64 rng(seed);
    double t = profile.interarrival.sample(rng);
    while (t < duration) {
        const double len = std::max(1.0, std::round(profile.length.sample(rng)));
        trace.packets.push_back({t, len});
        double next = t + profile.interarrival.sample(rng);
        if (next <= t) {
            next = std::nextafter(t, duration + 1.0);
        }
        t = next;
    }
    return trace;
}

FeatureMatrix extract_features(const PacketTrace& trace)
{
    const auto n = static_cast<Eigen::Index>(trace.packets.size());
    if (n == 0) {
        throw ValidationError("trace", "cannot extract features from an empty trace");
    }
    FeatureMatrix x(n, 3);
    double mean = 0.0;
    double m2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Packet& p = trace.packets[i];
        // Welford update; population variance over packets 0..i.
        const double delta = p.length - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (p.length - mean);
        x(i, 0) = p.length;
        x(i, 1) = i == 0 ? 0.0 : p.time - trace.packets[i - 1].time;
        x(i, 2) = i == 0 ? 0.0 : std::max(0.0, m2 / static_cast<double>(i + 1));
    }
    return x;
}

ChannelStats estimate_channel_stats(const PacketTrace& trace, double slot, double bitrate)
{
    if (!(slot > 0.0)) {
        throw ValidationError("slot", "must be > 0");
    }
    if (!(bitrate > 0.0)) {
        throw ValidationError("bitrate", "must be > 0");
    }
    if (!(trace.duration > 0.0)) {
        throw ValidationError("trace", "zero-duration trace");
    }
    const auto n = static_cast<long long>(std::ceil(trace.duration / slot - 1e-9));
    std::vector<char> busy(static_cast<std::size_t>(n), 0);
    long long count = 0;
    for (const Packet& p : trace.packets) {
        if (p.time > trace.duration) {
            continue;
        }
        ++count;
        const double end = p.time + 8.0 * p.length / bitrate;
        const auto first = static_cast<long long>(std::floor(p.time / slot));
        const auto last = std::min(n - 1, static_cast<long long>(std::ceil(end / slot)) - 1);
        for (long long j = std::max(0LL, first); j <= last; ++j) {
            busy[j] = 1;
        }
    }
    ChannelStats st;
    st.slots = n;
    const auto busy_slots = std::count(busy.begin(), busy.end(), 1);
    st.p_o = static_cast<double>(busy_slots) / static_cast<double>(n);
    st.p_i = static_cast<double>(n - busy_slots) / static_cast<double>(n);
    st.lambda = static_cast<double>(count) / trace.duration;
    return st;
}

LabeledFeatures sample_feature_points(const std::vector<TrafficProfile>& profiles, int n_points,
                                      int warmup, std::uint64_t seed, int per_trace)
{
    if (profiles.empty()) {
        throw ValidationError("profiles", "need at least one traffic profile");
    }
    if (n_points < 1) {
        throw ValidationError("points", "must be >= 1");
    }
    if (warmup < 0) {
        throw ValidationError("warmup", "must be >= 0");
    }
    if (per_trace < 0) {
        throw ValidationError("per_trace", "must be >= 0");
    }
    const int k = static_cast<int>(profiles.size());
    LabeledFeatures out;
    out.x.resize(n_points, 3);
    out.label.resize(n_points);
    out.subchannel.resize(n_points);
    int row = 0;
    int trace_id = 0;
    for (int p = 0; p < k; ++p) {
        const int want = n_points / k + (p < n_points % k ? 1 : 0);
        for (int done = 0; done < want; ++trace_id) {
            const int take = per_trace == 0 ? want : std::min(per_trace, want - done);
            const long long needed = static_cast<long long>(warmup) + take;
            double duration = 1.5 * needed * profiles[p].interarrival.mean + 1.0;
            PacketTrace trace;
            for (int attempt = 0;; ++attempt) {
                trace = generate_trace(profiles[p], duration, derive_seed(seed, trace_id), trace_id);
                if (static_cast<long long>(trace.packets.size()) >= needed) {
                    break;
                }
                if (attempt > 20) {
                    throw NumericError("could not generate enough packets for profile " +
                                       profiles[p].name);
                }
                duration *= 2.0;
            }
            const FeatureMatrix f = extract_features(trace);
            for (int j = 0; j < take; ++j, ++row) {
                out.x.row(row) = f.row(warmup + j);
                out.label[row] = p;
                out.subchannel[row] = trace_id;
            }
            done += take;
        }
    }
    return out;
}

PacketTrace ingest_trace(const std::filesystem::path& path, int subchannel_id)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(path.string() + ": cannot open trace file");
    }
    const auto fail = [&](long line, const std::string& what) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what);
    };
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) {
        fail(1, "missing header 'time_s,length_bytes'");
    }
    ++line_no;
    if (trim(line) != "time_s,length_bytes") {
        fail(line_no, "expected header 'time_s,length_bytes'");
    }
    PacketTrace trace;
    trace.subchannel_id = subchannel_id;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = trim(line);
        if (row.empty()) {
            continue;
        }
        const auto comma = row.find(',');
        if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
            fail(line_no, "expected two comma-separated fields");
        }
        const auto parse = [&](std::string_view field, const char* name) {
            field = trim(field);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
                fail(line_no, std::string("malformed ") + name + " '" + std::string(field) + "'");
            }
            return v;
        };
        const double t = parse(row.substr(0, comma), "time_s");
        const double len = parse(row.substr(comma + 1), "length_bytes");
        if (t < 0.0) {
            fail(line_no, "negative arrival time");
        }
        if (len <= 0.0) {
            fail(line_no, "packet length must be positive");
        }
        trace.packets.push_back({t, len});
    }
    std::stable_sort(trace.packets.begin(), trace.packets.end(),
                     [](const Packet& a, const Packet& b) { return a.time < b.time; });
    for (std::size_t i = 1; i < trace.packets.size(); ++i) {
        if (!(trace.packets[i].time > trace.packets[i - 1].time)) {
            throw std::runtime_error(path.string() + ": repeated arrival time " +
                                     std::to_string(trace.packets[i].time));
        }
    }
    trace.duration = trace.packets.empty() ? 0.0 : trace.packets.back().time;
    return trace;
}

}  // namespace rfcrn
