#include "crosscooc/common.hpp"

#include <filesystem>
#include <fstream>

namespace ccooc {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::kFileNotFound: return "FileNotFound";
    case Errc::kUnsupportedFormat: return "UnsupportedFormat";
    case Errc::kCorruptStream: return "CorruptStream";
    case Errc::kIoError: return "IoError";
    case Errc::kBadChannelIndex: return "BadChannelIndex";
    case Errc::kOffsetTooLarge: return "OffsetTooLarge";
    case Errc::kEmptyMatrix: return "EmptyMatrix";
    case Errc::kBadMagic: return "BadMagic";
    case Errc::kChannelCountMismatch: return "ChannelCountMismatch";
    case Errc::kDegenerateOutput: return "DegenerateOutput";
    case Errc::kCropLargerThanImage: return "CropLargerThanImage";
    case Errc::kBadWindow: return "BadWindow";
    case Errc::kBadParameter: return "BadParameter";
    case Errc::kUnsupportedMode: return "UnsupportedMode";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kNonFiniteFault: return "NonFiniteFault";
    case Errc::kMissingClassDir: return "MissingClassDir";
    case Errc::kEmptyClass: return "EmptyClass";
    case Errc::kInfeasibleSplit: return "InfeasibleSplit";
    case Errc::kPlaneCountMismatch: return "PlaneCountMismatch";
  }
  return "UnknownError";
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path))
      fail(Errc::kFileNotFound, path);
    fail(Errc::kIoError, "cannot open " + path);
  }
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
  if (in.bad()) fail(Errc::kIoError, "read failed: " + path);
  return bytes;
}

void write_binary_file(const std::string& path,
                       const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::kIoError, "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  if (!out) fail(Errc::kIoError, "write failed: " + path);
}

}  // namespace ccooc
