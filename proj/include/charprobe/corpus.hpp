#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace charprobe {

// A corpus is an ordered sequence of UTF-8 documents, one per LF-delimited
// line on disk. Empty lines are empty documents.
struct Corpus {
    std::vector<std::string> documents;

    size_t doc_count() const { return documents.size(); }
};

// Reads a newline-delimited UTF-8 corpus. Rejects invalid UTF-8, reporting
// the byte offset of the first bad byte.
Corpus load_corpus(const std::string& path);

// Canonical form: every document followed by a single LF. write_corpus then
// load_corpus round-trips byte-identically.
void write_corpus(const Corpus& corpus, const std::string& path);

// Returns the byte offset of the first invalid UTF-8 sequence, or -1 if the
// buffer is valid (overlongs, surrogates and values above U+10FFFF rejected).
long long utf8_validate(std::string_view data);

} // namespace charprobe
