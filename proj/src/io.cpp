#include "tdirac/io.hpp"

#include <fstream>
#include <sstream>

#include "tdirac/errors.hpp"

namespace tdirac {

namespace {

std::vector<double> number_array(const Json& j, std::size_t expected, const char* what) {
  if (!j.is_array() || j.size() != expected) {
    std::ostringstream os;
    os << what << ": expected an array of " << expected << " numbers";
    throw ConfigError(os.str());
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(std::string(what) + ": non-numeric entry");
    out.push_back(v.get<double>());
  }
  return out;
}

Eigen::Matrix4d matrix_from_row_major(const std::vector<double>& v) {
  Eigen::Matrix4d g;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) g(r, c) = v[4 * r + c];
  return g;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

Json to_json(const Multivectord& u) {
  Json j = Json::array();
  for (int i = 0; i < kBladeCount; ++i) j.push_back(u[i]);
  return j;
}

Multivectord multivector_from_json(const Json& j) {
  const auto v = number_array(j, kBladeCount, "multivector");
  Multivectord out;
  for (int i = 0; i < kBladeCount; ++i) out[i] = v[i];
  return out;
}

Json to_json(const MetricAtPointd& m) {
  Json g = Json::array();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) g.push_back(m.g()(r, c));
  return Json{{"g", g}};
}

MetricAtPointd metric_at_point_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("g")) throw ConfigError("metric: missing 'g'");
  return MetricAtPointd(matrix_from_row_major(number_array(j.at("g"), 16, "metric g")));
}

Json to_json(const ChartBox& box) {
  Json j;
  j["lo"] = std::vector<double>(box.lo.data(), box.lo.data() + 4);
  j["hi"] = std::vector<double>(box.hi.data(), box.hi.data() + 4);
  j["n"] = box.n;
  return j;
}

ChartBox chart_box_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi")) throw ConfigError("box: needs 'lo' and 'hi'");
  ChartBox box;
  const auto lo = number_array(j.at("lo"), 4, "box lo");
  const auto hi = number_array(j.at("hi"), 4, "box hi");
  for (int k = 0; k < 4; ++k) {
    box.lo[k] = lo[k];
    box.hi[k] = hi[k];
  }
  if (j.contains("n")) {
    const auto n = number_array(j.at("n"), 4, "box n");
    for (int k = 0; k < 4; ++k) box.n[k] = static_cast<int>(n[k]);
  }
  box.validate();
  return box;
}

ChartBox parse_box(const std::string& text) {
  ChartBox box;
  std::string ranges = text;
  const auto at = text.find('@');
  if (at != std::string::npos) {
    ranges = text.substr(0, at);
    const auto counts = split(text.substr(at + 1), ',');
    if (counts.size() == 1) {
      box.n.fill(static_cast<int>(parse_double(counts[0])));
    } else if (counts.size() == 4) {
      for (int k = 0; k < 4; ++k) box.n[k] = static_cast<int>(parse_double(counts[k]));
    } else {
      throw ConfigError("box: grid counts must be 'n' or 'n0,n1,n2,n3'");
    }
  }
  const auto axes = split(ranges, ',');
  if (axes.size() != 1 && axes.size() != 4) throw ConfigError("box: expected 'lo:hi' or four comma-separated ranges");
  for (int k = 0; k < 4; ++k) {
    const auto parts = split(axes[axes.size() == 1 ? 0 : k], ':');
    if (parts.size() != 2) throw ConfigError("box: range must be 'lo:hi'");
    box.lo[k] = parse_double(parts[0]);
    box.hi[k] = parse_double(parts[1]);
  }
  box.validate();
  return box;
}

MetricField sampled_metric_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("box") || !j.contains("g"))
    throw ConfigError("sampled metric: needs 'box' and 'g'");
  const ChartBox box = chart_box_from_json(j.at("box"));
  const Json& g = j.at("g");
  const std::size_t expected = static_cast<std::size_t>(box.n[0]) * box.n[1] * box.n[2] * box.n[3];
  if (!g.is_array() || g.size() != expected) {
    std::ostringstream os;
    os << "sampled metric: expected " << expected << " samples of g";
    throw ConfigError(os.str());
  }
  std::vector<Eigen::Matrix4d> samples;
  samples.reserve(expected);
  for (const auto& s : g) samples.push_back(matrix_from_row_major(number_array(s, 16, "sampled g")));
  return sampled_metric(box, samples);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

MetricField load_sampled_metric(const std::string& path) {
  MetricField mf = sampled_metric_from_json(read_json_file(path));
  mf.set_descriptor("sampled:" + path);
  return mf;
}

}  // namespace tdirac
