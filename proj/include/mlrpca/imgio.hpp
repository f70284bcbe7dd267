#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mlrpca/image.hpp"

namespace mlrpca {

enum class SequenceKind { Day, Night };

std::string_view to_string(SequenceKind kind) noexcept;

struct FrameEntry {
  std::filesystem::path image_path;
  std::optional<std::filesystem::path> gt_path;
  std::optional<std::string> timestamp;
};

/// One day or one night of frames. Relative paths in the manifest file are
/// resolved against the manifest's directory.
struct SequenceManifest {
  std::string sequence_id;
  SequenceKind kind = SequenceKind::Day;
  std::vector<FrameEntry> frames;
};

SequenceManifest load_manifest(const std::filesystem::path& path);
SequenceManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir = {});
void save_manifest(const SequenceManifest& manifest, const std::filesystem::path& path);

/// Source dimensions of an image file (decodes it).
Size probe_size(const std::filesystem::path& path);

/// Working resolution: source divided by `scale` per axis, at least 1 pixel.
Size working_size_for(Size source, int scale);

GrayImage load_image(const std::filesystem::path& path, Size working_size);
BinaryMask load_mask(const std::filesystem::path& path, Size working_size);

/// Writes an 8-bit single-channel PNG with values {0, 255}.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);
/// Writes an 8-bit single-channel PNG, values rounded from [0,1].
void save_image(const GrayImage& img, const std::filesystem::path& path);

// Resampling kernels; a no-op when the target size equals the source size.
GrayImage resize_bilinear(const GrayImage& img, Size target);
BinaryMask resize_nearest(const BinaryMask& mask, Size target);

}  // namespace mlrpca
