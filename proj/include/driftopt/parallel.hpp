#pragma once

namespace driftopt {

/// Selects between the serial reference path and the OpenMP path of a kernel.
/// Both paths produce bit-identical results.
enum class Execution { serial, parallel };

}  // namespace driftopt
