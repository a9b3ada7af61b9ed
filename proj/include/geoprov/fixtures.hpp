#pragma once

#include <filesystem>
#include <string>

namespace geoprov {

// Turns human-written fixture manifests into a FixtureBackend directory.
//
// Every *.json file in `src_dir` is a manifest with any of these sections:
//   "wiki":   [{"lang", "title", "extlinks": [...], "page_size": n,
//               "langlinks": {"de": "Titel"}, "missing": bool}]
//   "dns":    {"host": ["192.0.2.1"]}
//   "pages":  [{"url", "file" | "html" | "status" | "unreachable"}]
//   "sparql": {"endpoint", "triples": [[s, p, o]], "hosts": [...]}
//   "raw":    [fixture documents written as-is]
// Wiki and SPARQL requests are rendered with the same URL and query builders
// the clients use, and SPARQL answers are evaluated over the listed triples
// for every host linked from a manifest article. Returns the number of
// fixture files written.
size_t compile_fixtures(const std::filesystem::path& src_dir, const std::filesystem::path& out_dir);

}  // namespace geoprov
