#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "tdirac/geometry.hpp"
#include "tdirac/metric.hpp"
#include "tdirac/multivector.hpp"

namespace tdirac {

using Json = nlohmann::json;

// 16 numbers in canonical blade order.
Json to_json(const Multivectord& u);
Multivectord multivector_from_json(const Json& j);

// {"g": [16 numbers, row-major]}; derived fields are recomputed on load.
Json to_json(const MetricAtPointd& m);
MetricAtPointd metric_at_point_from_json(const Json& j);

// {"lo": [4], "hi": [4], "n": [4]}
Json to_json(const ChartBox& box);
ChartBox chart_box_from_json(const Json& j);

// Parses "lo:hi" (all axes) or "lo0:hi0,lo1:hi1,lo2:hi2,lo3:hi3", with an
// optional "@n" or "@n0,n1,n2,n3" suffix for grid counts.
ChartBox parse_box(const std::string& text);

// Sampled metric file: {"box": {...}, "g": [[16 numbers] per grid node]}.
// Nodes are ordered as ChartBox::nodes() (last coordinate fastest).
MetricField sampled_metric_from_json(const Json& j);
MetricField load_sampled_metric(const std::string& path);

Json read_json_file(const std::string& path);

}  // namespace tdirac
