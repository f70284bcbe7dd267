#include "mlrpca/imgio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "mlrpca/error.hpp"

namespace mlrpca {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(SequenceKind kind) noexcept { return kind == SequenceKind::Day ? "day" : "night"; }

namespace {

std::string read_text(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::MissingFile, path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

// Decoded pixels as a single luma plane in [0,1] at source resolution.
GrayImage decode_luma(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::MissingFile, path.string());
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty()) throw Error(ErrorCode::DecodeError, path.string());

  double full_scale = 1.0;
  switch (raw.depth()) {
    case CV_8U: full_scale = 255.0; break;
    case CV_16U: full_scale = 65535.0; break;
    case CV_32F:
    case CV_64F: full_scale = 1.0; break;
    default: throw Error(ErrorCode::DecodeError, "unsupported pixel depth in " + path.string());
  }
  cv::Mat pixels;
  raw.convertTo(pixels, CV_64F, 1.0 / full_scale);

  const int channels = pixels.channels();
  GrayImage out(pixels.cols, pixels.rows);
  for (int y = 0; y < pixels.rows; ++y) {
    const double* row = pixels.ptr<double>(y);
    for (int x = 0; x < pixels.cols; ++x) {
      const double* px = row + static_cast<std::ptrdiff_t>(x) * channels;
      double v;
      if (channels >= 3)  // OpenCV stores BGR(A)
        v = 0.299 * px[2] + 0.587 * px[1] + 0.114 * px[0];
      else
        v = px[0];
      out.at(x, y) = std::clamp(v, 0.0, 1.0);
    }
  }
  return out;
}

void check_working_size(Size s) {
  if (s.width <= 0 || s.height <= 0)
    throw Error(ErrorCode::ZeroSize, "working size " + std::to_string(s.width) + "x" + std::to_string(s.height));
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

}  // namespace

SequenceManifest parse_manifest(const std::string& json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "manifest must be a JSON object");

  SequenceManifest m;
  try {
    m.sequence_id = doc.at("sequence_id").get<std::string>();
    const auto kind = doc.at("kind").get<std::string>();
    if (kind == "day" || kind == "Day")
      m.kind = SequenceKind::Day;
    else if (kind == "night" || kind == "Night")
      m.kind = SequenceKind::Night;
    else
      throw Error(ErrorCode::ParseError, "kind must be \"day\" or \"night\", got \"" + kind + "\"");

    const auto& frames = doc.at("frames");
    if (!frames.is_array()) throw Error(ErrorCode::ParseError, "frames must be an array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const auto& f = frames[i];
      if (!f.is_object()) throw Error(ErrorCode::ParseError, "frame " + std::to_string(i) + " is not an object");
      FrameEntry e;
      e.image_path = resolve(base_dir, f.at("image").get<std::string>());
      if (f.contains("gt") && !f["gt"].is_null()) e.gt_path = resolve(base_dir, f["gt"].get<std::string>());
      if (f.contains("timestamp") && !f["timestamp"].is_null()) e.timestamp = f["timestamp"].get<std::string>();
      if (!seen.insert(e.image_path.generic_string()).second)
        throw Error(ErrorCode::ParseError, "duplicate image path " + e.image_path.generic_string());
      m.frames.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (m.frames.empty()) throw Error(ErrorCode::EmptySequence, "sequence " + m.sequence_id + " has no frames");
  return m;
}

SequenceManifest load_manifest(const fs::path& path) {
  return parse_manifest(read_text(path), path.parent_path());
}

void save_manifest(const SequenceManifest& manifest, const fs::path& path) {
  const fs::path base = path.parent_path();
  auto rel = [&](const fs::path& p) { return base.empty() ? p.generic_string() : p.lexically_proximate(base).generic_string(); };
  json doc;
  doc["sequence_id"] = manifest.sequence_id;
  doc["kind"] = std::string(to_string(manifest.kind));
  doc["frames"] = json::array();
  for (const auto& f : manifest.frames) {
    json e;
    e["image"] = rel(f.image_path);
    if (f.gt_path) e["gt"] = rel(*f.gt_path);
    if (f.timestamp) e["timestamp"] = *f.timestamp;
    doc["frames"].push_back(std::move(e));
  }
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

Size probe_size(const fs::path& path) {
  const auto img = decode_luma(path);
  return img.size();
}

Size working_size_for(Size source, int scale) {
  if (scale < 1) throw Error(ErrorCode::InvalidArgument, "scale must be >= 1");
  return {std::max(1, source.width / scale), std::max(1, source.height / scale)};
}

GrayImage resize_bilinear(const GrayImage& img, Size target) {
  check_working_size(target);
  if (img.size() == target) return img;
  GrayImage out(target.width, target.height);
  const double sx_scale = static_cast<double>(img.width) / target.width;
  const double sy_scale = static_cast<double>(img.height) / target.height;
  for (int y = 0; y < target.height; ++y) {
    const double sy = std::clamp((y + 0.5) * sy_scale - 0.5, 0.0, static_cast<double>(img.height - 1));
    const int y0 = static_cast<int>(sy);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fy = sy - y0;
    for (int x = 0; x < target.width; ++x) {
      const double sx = std::clamp((x + 0.5) * sx_scale - 0.5, 0.0, static_cast<double>(img.width - 1));
      const int x0 = static_cast<int>(sx);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double fx = sx - x0;
      const double top = (1.0 - fx) * img.at(x0, y0) + fx * img.at(x1, y0);
      const double bottom = (1.0 - fx) * img.at(x0, y1) + fx * img.at(x1, y1);
      out.at(x, y) = std::clamp((1.0 - fy) * top + fy * bottom, 0.0, 1.0);
    }
  }
  return out;
}

BinaryMask resize_nearest(const BinaryMask& mask, Size target) {
  check_working_size(target);
  if (mask.size() == target) return mask;
  BinaryMask out(target.width, target.height);
  for (int y = 0; y < target.height; ++y) {
    // source index floor((y + 1/2) * src / dst) in exact integer arithmetic
    const int sy = static_cast<int>((2LL * y + 1) * mask.height / (2LL * target.height));
    for (int x = 0; x < target.width; ++x) {
      const int sx = static_cast<int>((2LL * x + 1) * mask.width / (2LL * target.width));
      out.set(x, y, mask.at(sx, sy));
    }
  }
  return out;
}

GrayImage load_image(const fs::path& path, Size working_size) {
  check_working_size(working_size);
  return resize_bilinear(decode_luma(path), working_size);
}

BinaryMask load_mask(const fs::path& path, Size working_size) {
  check_working_size(working_size);
  const auto luma = decode_luma(path);
  BinaryMask full(luma.width, luma.height);
  for (std::size_t i = 0; i < luma.data.size(); ++i) full.data[i] = luma.data[i] >= 0.5 ? 1 : 0;
  return resize_nearest(full, working_size);
}

void save_mask(const BinaryMask& mask, const fs::path& path) {
  cv::Mat m(mask.height, mask.width, CV_8UC1);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) m.at<std::uint8_t>(y, x) = mask.at(x, y) ? 255 : 0;
  ensure_parent(path);
  if (!cv::imwrite(path.string(), m)) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

void save_image(const GrayImage& img, const fs::path& path) {
  cv::Mat m(img.height, img.width, CV_8UC1);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      m.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(std::lround(std::clamp(img.at(x, y), 0.0, 1.0) * 255.0));
  ensure_parent(path);
  if (!cv::imwrite(path.string(), m)) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

}  // namespace mlrpca
