#pragma once

#include <stdexcept>
#include <string>

namespace cishtex {

/// Base of every error raised by the pipeline. `name()` is the stable error
/// identifier printed by the CLI on failure.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define CISHTEX_DEFINE_ERROR(Type)                                  \
    class Type : public Error {                                     \
    public:                                                         \
        explicit Type(const std::string& what) : Error(#Type, what) {} \
    }

// imaging
CISHTEX_DEFINE_ERROR(UnreadableFile);
CISHTEX_DEFINE_ERROR(UnsupportedBitDepth);
CISHTEX_DEFINE_ERROR(InvalidBinCount);
CISHTEX_DEFINE_ERROR(DimensionMismatch);
// tiling / texture
CISHTEX_DEFINE_ERROR(EmptyGrid);
CISHTEX_DEFINE_ERROR(NoValidPairs);
// reduction / clustering
CISHTEX_DEFINE_ERROR(InvalidInput);
CISHTEX_DEFINE_ERROR(TooFewPoints);
// evaluation
CISHTEX_DEFINE_ERROR(OutOfRangeScore);
CISHTEX_DEFINE_ERROR(UnknownTile);
CISHTEX_DEFINE_ERROR(MissingClassScore);
// cli
CISHTEX_DEFINE_ERROR(ConfigInvalid);
CISHTEX_DEFINE_ERROR(StageInputMissing);

#undef CISHTEX_DEFINE_ERROR

}  // namespace cishtex
