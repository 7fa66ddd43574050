#pragma once

#include <cstdint>
#include <string>

namespace vulngraph::pipeline {

struct CorpusSpec {
  std::size_t files = 400;  // rounded up to a multiple of the template set
  std::uint64_t seed = 0;
};

/// Writes a balanced synthetic Java corpus under out_dir: numbered
/// .java files in src/ plus labels.csv. Safe/vulnerable pairs are drawn
/// from parameterized templates (string-concatenated SQL, unclosed
/// resources, unvalidated exec/path input) with seeded identifier and
/// structure variation so no two files are byte-identical. Returns the
/// number of files written.
std::size_t generate_corpus(const std::string& out_dir,
                            const CorpusSpec& spec = CorpusSpec());

}  // namespace vulngraph::pipeline
