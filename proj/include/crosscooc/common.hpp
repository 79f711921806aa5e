#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccooc {

enum class Errc {
  kFileNotFound,
  kUnsupportedFormat,
  kCorruptStream,
  kIoError,
  kBadChannelIndex,
  kOffsetTooLarge,
  kEmptyMatrix,
  kBadMagic,
  kChannelCountMismatch,
  kDegenerateOutput,
  kCropLargerThanImage,
  kBadWindow,
  kBadParameter,
  kUnsupportedMode,
  kShapeMismatch,
  kNonFiniteFault,
  kMissingClassDir,
  kEmptyClass,
  kInfeasibleSplit,
  kPlaneCountMismatch,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }

  // Numeric faults map to CLI exit code 3, everything else to 2.
  bool is_numeric_fault() const { return code_ == Errc::kNonFiniteFault; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

// Rounds half away from zero; the single policy used wherever a float
// becomes an 8-bit sample.
inline int round_half_away(double v) {
  return v >= 0.0 ? static_cast<int>(v + 0.5) : -static_cast<int>(-v + 0.5);
}

inline std::uint8_t clamp_u8(double v) {
  int r = round_half_away(v);
  if (r < 0) return 0;
  if (r > 255) return 255;
  return static_cast<std::uint8_t>(r);
}

inline std::uint8_t clamp_u8_int(int v) {
  if (v < 0) return 0;
  if (v > 255) return 255;
  return static_cast<std::uint8_t>(v);
}

std::vector<std::uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path,
                       const std::vector<std::uint8_t>& bytes);

}  // namespace ccooc
