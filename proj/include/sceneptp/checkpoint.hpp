#pragma once

#include <filesystem>
#include <iosfwd>

#include "sceneptp/model.hpp"

namespace sceneptp {

/// Binary checkpoint: "SPTP", version, value width, model config text, then
/// every parameter as name, shape and little-endian values. Values keep the
/// precision of the model that wrote them.
template <Real T>
void save_checkpoint(std::ostream& out, const TrajectoryModel<T>& model);
template <Real T>
void save_checkpoint(const std::filesystem::path& path, const TrajectoryModel<T>& model);

/// Rebuilds the model from its stored config and overwrites every parameter.
/// Corrupt or truncated files raise FormatError; parameters that do not
/// match the architecture raise IntegrityError.
template <Real T>
TrajectoryModel<T> load_checkpoint(std::istream& in);
template <Real T>
TrajectoryModel<T> load_checkpoint(const std::filesystem::path& path);

}  // namespace sceneptp
