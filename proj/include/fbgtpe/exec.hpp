#pragma once

namespace fbgtpe {

// Execution policy for batch kernels. Serial variants are the reference
// implementations; parallel variants must produce identical output.
enum class Exec { serial, parallel };

}  // namespace fbgtpe
