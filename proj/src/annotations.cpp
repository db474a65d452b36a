#include <cmath>
#include <fstream>
#include <sstream>

#include "textworld/error.hpp"
#include "textworld/pipeline.hpp"

namespace textworld {

namespace {

using nlohmann::json;

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

json points(std::span<const Vec2> pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back({round3(p.x), round3(p.y)});
  return a;
}

std::vector<Vec2> read_points(const json& a) {
  std::vector<Vec2> out;
  for (const auto& p : a) out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return out;
}

double distance_to_polygon(const Polygon& poly, Vec2 p) {
  if (contains_convex(poly, p)) return 0;
  double best = kInf;
  for (std::size_t i = 0; i < poly.size(); i++) {
    Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    double t = len2 > 0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, length(p - (a + ab * t)));
  }
  return best;
}

}  // namespace

nlohmann::json to_json(const SampleRecord& r) {
  json j;
  j["id"] = r.id;
  j["image"] = r.image;
  j["width"] = r.width;
  j["height"] = r.height;
  j["scene"] = r.scene;
  j["index"] = r.index;
  j["seed"] = r.seed;
  j["attempt"] = r.attempt;
  j["pose"] = {{"position", {r.pose.position.x, r.pose.position.y, r.pose.position.z}},
      {"pitch", r.pose.pitch}, {"yaw", r.pose.yaw}, {"roll", r.pose.roll}};
  j["instances"] = r.instances;
  j["words"] = json::array();
  for (const auto& w : r.words) {
    json jw;
    jw["text"] = w.text;
    jw["language"] = w.language;
    jw["font"] = w.font;
    jw["instance"] = w.instance;
    jw["word"] = w.word;
    jw["quad"] = points(w.quad);
    jw["polygon"] = points(w.polygon);
    jw["small"] = w.small;
    jw["ignore"] = w.ignore;
    jw["visibility"] = round3(w.visibility);
    jw["chars"] = json::array();
    for (const auto& c : w.chars) jw["chars"].push_back({{"text", c.text}, {"polygon", points(c.polygon)}});
    j["words"].push_back(jw);
  }
  return j;
}

SampleRecord sample_from_json(const nlohmann::json& j) {
  SampleRecord r;
  try {
    r.id = j.at("id");
    r.image = j.at("image");
    r.width = j.at("width");
    r.height = j.at("height");
    r.scene = j.at("scene");
    r.index = j.at("index");
    r.seed = j.at("seed");
    r.attempt = j.value("attempt", 0);
    const auto& p = j.at("pose");
    r.pose.position = {p.at("position").at(0), p.at("position").at(1), p.at("position").at(2)};
    r.pose.pitch = p.at("pitch");
    r.pose.yaw = p.at("yaw");
    r.pose.roll = p.value("roll", 0.0);
    r.instances = j.value("instances", 0);
    for (const auto& jw : j.at("words")) {
      WordRecord w;
      w.text = jw.at("text");
      w.language = jw.value("language", "");
      w.font = jw.value("font", "");
      w.instance = jw.value("instance", 0);
      w.word = jw.value("word", 0);
      auto quad = read_points(jw.at("quad"));
      if (quad.size() != 4) throw ParseError("word quad must have 4 points");
      std::copy(quad.begin(), quad.end(), w.quad.begin());
      w.polygon = read_points(jw.at("polygon"));
      w.small = jw.value("small", false);
      w.ignore = jw.value("ignore", false);
      w.visibility = jw.value("visibility", 1.0);
      for (const auto& jc : jw.at("chars")) w.chars.push_back({jc.at("text"), read_points(jc.at("polygon"))});
      r.words.push_back(std::move(w));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed annotation record: ") + e.what());
  }
  return r;
}

std::vector<SampleRecord> read_annotations(const std::filesystem::path& dataset_dir) {
  auto path = dataset_dir / "annotations.jsonl";
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<SampleRecord> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(sample_from_json(json::parse(line)));
  return out;
}

std::vector<std::string> validate_record(const SampleRecord& r) {
  std::vector<std::string> issues;
  auto report = [&](const std::string& what) { issues.push_back(r.id + ": " + what); };
  const double tol = 1e-3;
  auto in_bounds = [&](const std::vector<Vec2>& poly) {
    return std::all_of(poly.begin(), poly.end(), [&](Vec2 p) {
      return p.x >= -tol && p.y >= -tol && p.x <= r.width + tol && p.y <= r.height + tol;
    });
  };
  for (std::size_t wi = 0; wi < r.words.size(); wi++) {
    const auto& w = r.words[wi];
    std::string tag = "word " + std::to_string(wi) + " '" + w.text + "'";
    if (w.text.empty()) report(tag + " has empty content");
    if (w.polygon.size() < 3 || !(area(w.polygon) > 0)) report(tag + " has zero polygon area");
    if (!in_bounds(w.polygon)) report(tag + " polygon leaves the image");
    std::string joined;
    for (const auto& c : w.chars) {
      joined += c.text;
      if (!in_bounds(c.polygon)) report(tag + " character '" + c.text + "' leaves the image");
      for (const auto& p : c.polygon)
        if (distance_to_polygon(w.polygon, p) > 2.0 + tol) {
          report(tag + " character '" + c.text + "' lies outside the word polygon");
          break;
        }
    }
    if (joined != w.text) report(tag + " differs from its characters '" + joined + "'");
  }
  return issues;
}

std::vector<std::string> validate_dataset(const std::filesystem::path& dataset_dir) {
  std::vector<std::string> issues;
  for (const auto& r : read_annotations(dataset_dir)) {
    auto image_path = dataset_dir / r.image;
    if (!std::filesystem::exists(image_path)) {
      issues.push_back(r.id + ": missing image " + r.image);
    } else {
      auto img = read_png(image_path);
      if (img.width != r.width || img.height != r.height)
        issues.push_back(r.id + ": image size differs from the record");
    }
    auto more = validate_record(r);
    issues.insert(issues.end(), more.begin(), more.end());
  }
  return issues;
}

CropStats export_word_crops(const std::filesystem::path& dataset_dir,
    const std::filesystem::path& out_dir, int min_width, int margin) {
  CropStats stats;
  std::filesystem::create_directories(out_dir / "images");
  std::ofstream labels(out_dir / "labels.txt", std::ios::binary);
  if (!labels) throw Error("cannot write " + (out_dir / "labels.txt").string());
  for (const auto& r : read_annotations(dataset_dir)) {
    if (r.words.empty()) continue;
    Image8 image = read_png(dataset_dir / r.image);
    for (std::size_t wi = 0; wi < r.words.size(); wi++) {
      const auto& w = r.words[wi];
      stats.words++;
      if (w.ignore) {
        stats.dropped_ignored++;
        continue;
      }
      double minx = kInf, miny = kInf, maxx = -kInf, maxy = -kInf;
      for (const auto& p : w.polygon) {
        minx = std::min(minx, p.x);
        maxx = std::max(maxx, p.x);
        miny = std::min(miny, p.y);
        maxy = std::max(maxy, p.y);
      }
      int x0 = std::max(0, static_cast<int>(std::floor(minx)) - margin);
      int y0 = std::max(0, static_cast<int>(std::floor(miny)) - margin);
      int x1 = std::min(image.width, static_cast<int>(std::ceil(maxx)) + margin);
      int y1 = std::min(image.height, static_cast<int>(std::ceil(maxy)) + margin);
      if (x1 - x0 < min_width || y1 <= y0) {
        stats.dropped_narrow++;
        continue;
      }
      std::string name = "images/" + r.id + "_" + std::to_string(wi) + ".png";
      write_png(out_dir / name, crop(image, x0, y0, x1, y1));
      labels << name << '\t' << w.text << '\n';
      stats.written++;
    }
  }
  return stats;
}

std::size_t export_icdar(const std::filesystem::path& dataset_dir,
    const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::size_t files = 0;
  for (const auto& r : read_annotations(dataset_dir)) {
    std::ofstream out(out_dir / ("gt_" + r.id + ".txt"), std::ios::binary);
    for (const auto& w : r.words) {
      for (const auto& p : w.quad)
        out << static_cast<long>(std::lround(std::clamp(p.x, 0.0, double(r.width)))) << ','
            << static_cast<long>(std::lround(std::clamp(p.y, 0.0, double(r.height)))) << ',';
      out << (w.ignore ? std::string("###") : w.text) << '\n';
    }
    files++;
  }
  return files;
}

}  // namespace textworld
