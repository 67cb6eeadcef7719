#include "charprobe/corpus.hpp"

#include <fstream>
#include <sstream>

#include "charprobe/error.hpp"

namespace charprobe {

long long utf8_validate(std::string_view data) {
    size_t i = 0;
    const size_t n = data.size();
    while (i < n) {
        unsigned char b0 = static_cast<unsigned char>(data[i]);
        if (b0 < 0x80) {
            ++i;
            continue;
        }
        size_t len;
        uint32_t cp;
        if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        } else {
            return static_cast<long long>(i);
        }
        if (i + len > n) return static_cast<long long>(i);
        for (size_t k = 1; k < len; ++k) {
            unsigned char bk = static_cast<unsigned char>(data[i + k]);
            if ((bk & 0xC0) != 0x80) return static_cast<long long>(i);
            cp = (cp << 6) | (bk & 0x3F);
        }
        bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                        (len == 4 && cp < 0x10000);
        if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            return static_cast<long long>(i);
        i += len;
    }
    return -1;
}

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw DataError("I/O failure reading corpus file: " + path);
    std::string data = std::move(buf).str();

    long long bad = utf8_validate(data);
    if (bad >= 0)
        throw DataError("invalid UTF-8 in " + path + " at byte offset " +
                        std::to_string(bad));

    Corpus corpus;
    size_t start = 0;
    for (size_t i = 0; i < data.size(); ++i) {
        if (data[i] == '\n') {
            corpus.documents.emplace_back(data, start, i - start);
            start = i + 1;
        }
    }
    if (start < data.size())
        corpus.documents.emplace_back(data, start, data.size() - start);
    return corpus;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open corpus file for writing: " + path);
    for (const auto& doc : corpus.documents) {
        out.write(doc.data(), static_cast<std::streamsize>(doc.size()));
        out.put('\n');
    }
    if (!out) throw DataError("I/O failure writing corpus file: " + path);
}

} // namespace charprobe
