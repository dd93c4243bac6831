#pragma once

#include <string>

#include "aor/dataset.hpp"

namespace aor {

/// Reads a feature CSV with header `f0,...,f{d-1}[,y],g`. The `y` column is
/// optional; its presence is detected from the header. Throws CsvError with
/// the 1-based line number for: missing/duplicate/unknown header columns,
/// wrong field count, unparsable numbers, out-of-range labels, and non-finite
/// features.
GroupLabeledDataset ingest_feature_csv(const std::string& path);

/// Writes the dataset in the same layout, features at 17 significant digits
/// so a round trip is bit-exact. Throws IoError on failure to write.
void export_feature_csv(const GroupLabeledDataset& ds, const std::string& path);

} // namespace aor
