#pragma once

#include <string>
#include <vector>

#include "vcmd/types.hpp"

namespace vcmd {

struct Score {
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    double f_measure = 0;
    bool detected = false;        // filled by the caller from the decision
    double cpu_s_per_mpixel = 0;  // filled by the caller from timings
};

/// Site counts and F = 2TP/(2TP+FP+FN). The 0/0 case is 1 when both map
/// and ground truth are empty, otherwise 0.
Score score(const MaskVolume& map, const MaskVolume& gt);

/// One table row: detection on the forged video, false alarm on its
/// pristine companion, localization F and normalized runtime.
struct BatchItem {
    std::string name;
    bool detected = false;
    bool false_alarm = false;
    double f_measure = 0;
    double cpu_s_per_mpixel = 0;
};

struct BatchSummary {
    int items = 0;
    int detections = 0;
    int false_alarms = 0;
    double mean_f = 0;
    double mean_time = 0;
};

BatchSummary batch_report(const std::vector<BatchItem>& items);

std::string batch_to_json(const std::vector<BatchItem>& items);
std::string batch_to_csv(const std::vector<BatchItem>& items);

} // namespace vcmd
