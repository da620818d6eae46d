#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace masslab {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_parameter : error {
    using error::error;
};

/// Two states that were expected to share grid / mass list do not.
struct incompatible_states : error {
    using error::error;
};

/// A mass does not sit on the conjugate lattice of the s-grid.
struct lattice_mismatch : error {
    using error::error;
};

/// A wavepacket leaked into the boundary margin of the periodic box.
struct out_of_box : error {
    out_of_box(const std::string& what, std::size_t step)
        : error(what), step_index(step) {}
    std::size_t step_index;
};

/// State violates the positive-mass restriction needed by reciprocal-mass
/// operators (nonzero zero-mass component).
struct non_convergent_state : error {
    using error::error;
};

struct insufficient_data : error {
    using error::error;
};

struct unsupported_feature : error {
    using error::error;
};

/// Scenario configuration problems; message names the offending field.
struct config_error : error {
    using error::error;
};

/// Snapshot file problems (bad magic, version, checksum, truncation).
struct snapshot_error : error {
    using error::error;
};

}  // namespace masslab
