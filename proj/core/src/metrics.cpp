#include "vcmd/metrics.hpp"

#include <nlohmann/json.hpp>

#include <sstream>

namespace vcmd {

Score score(const MaskVolume& map, const MaskVolume& gt) {
    if (!map.same_dims(gt))
        throw ConfigError("score: map and ground truth dimensions differ");
    Score s;
    for (std::size_t i = 0; i < map.bits.size(); ++i) {
        const bool m = map.bits[i] != 0, g = gt.bits[i] != 0;
        if (m && g)
            ++s.tp;
        else if (m && !g)
            ++s.fp;
        else if (!m && g)
            ++s.fn;
        else
            ++s.tn;
    }
    const std::int64_t denom = 2 * s.tp + s.fp + s.fn;
    s.f_measure = denom > 0 ? 2.0 * double(s.tp) / double(denom) : 1.0;
    return s;
}

BatchSummary batch_report(const std::vector<BatchItem>& items) {
    BatchSummary sum;
    sum.items = static_cast<int>(items.size());
    for (const auto& item : items) {
        sum.detections += item.detected ? 1 : 0;
        sum.false_alarms += item.false_alarm ? 1 : 0;
        sum.mean_f += item.f_measure;
        sum.mean_time += item.cpu_s_per_mpixel;
    }
    if (!items.empty()) {
        sum.mean_f /= double(items.size());
        sum.mean_time /= double(items.size());
    }
    return sum;
}

std::string batch_to_json(const std::vector<BatchItem>& items) {
    nlohmann::ordered_json j;
    j["videos"] = nlohmann::ordered_json::array();
    for (const auto& item : items)
        j["videos"].push_back({{"name", item.name},
                               {"detected", item.detected},
                               {"false_alarm", item.false_alarm},
                               {"f_measure", item.f_measure},
                               {"cpu_s_per_mpixel", item.cpu_s_per_mpixel}});
    const BatchSummary sum = batch_report(items);
    j["summary"] = {{"items", sum.items},
                    {"detections", sum.detections},
                    {"false_alarms", sum.false_alarms},
                    {"mean_f", sum.mean_f},
                    {"mean_time", sum.mean_time}};
    return j.dump(2);
}

std::string batch_to_csv(const std::vector<BatchItem>& items) {
    std::ostringstream out;
    out << "video,det,f.a.,F,time\n";
    for (const auto& item : items)
        out << item.name << ',' << (item.detected ? 1 : 0) << ','
            << (item.false_alarm ? 1 : 0) << ',' << item.f_measure << ','
            << item.cpu_s_per_mpixel << '\n';
    const BatchSummary sum = batch_report(items);
    out << "sum_mean," << sum.detections << ',' << sum.false_alarms << ','
        << sum.mean_f << ',' << sum.mean_time << '\n';
    return out.str();
}

} // namespace vcmd
