#include "readlm/text.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace readlm::text {

namespace {

// Minimal UTF-8 decoding. Input is expected to be valid UTF-8; stray bytes
// are passed through as single-byte code points.
char32_t next_codepoint(std::string_view s, std::size_t& i) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xe0) == 0xc0) {
        len = 2;
        cp = b0 & 0x1f;
    } else if ((b0 & 0xf0) == 0xe0) {
        len = 3;
        cp = b0 & 0x0f;
    } else if ((b0 & 0xf8) == 0xf0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return b0;
    }
    if (i + len > s.size()) {
        ++i;
        return b0;
    }
    for (int k = 1; k < len; ++k) {
        const unsigned char bk = static_cast<unsigned char>(s[i + k]);
        if ((bk & 0xc0) != 0x80) {
            ++i;
            return b0;
        }
        cp = (cp << 6) | (bk & 0x3f);
    }
    i += len;
    return cp;
}

void append_codepoint(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

bool is_space_cp(char32_t cp) {
    switch (cp) {
        case U' ':
        case U'\t':
        case U'\n':
        case U'\r':
        case U'\f':
        case U'\v':
        case 0x0085:
        case 0x00a0:
        case 0x1680:
        case 0x2028:
        case 0x2029:
        case 0x202f:
        case 0x205f:
        case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200a;
    }
}

// Unicode punctuation (category P*) over the blocks that occur in ordinary
// English text: ASCII, Latin-1, General Punctuation, CJK brackets and
// fullwidth forms. Symbols (S*) such as + = < > are deliberately not
// punctuation and survive.
bool is_punct_cp(char32_t cp) {
    if (cp < 0x80) {
        static constexpr std::string_view kAsciiPunct = "!\"#%&'()*,-./:;?@[\\]_{}";
        return kAsciiPunct.find(static_cast<char>(cp)) != std::string_view::npos;
    }
    switch (cp) {
        case 0x00a1:  // inverted exclamation
        case 0x00a7:  // section sign
        case 0x00ab:  // left guillemet
        case 0x00b6:  // pilcrow
        case 0x00b7:  // middle dot
        case 0x00bb:  // right guillemet
        case 0x00bf:  // inverted question mark
            return true;
        default:
            break;
    }
    if (cp >= 0x2010 && cp <= 0x2027) return true;  // dashes, quotes, daggers, ellipsis
    if (cp >= 0x2030 && cp <= 0x2043) return true;  // permille, primes, brackets
    if (cp >= 0x2045 && cp <= 0x2051) return true;
    if (cp >= 0x2053 && cp <= 0x205e) return true;
    if (cp >= 0x2e00 && cp <= 0x2e7f) return true;  // supplemental punctuation
    if (cp >= 0x3001 && cp <= 0x3003) return true;  // CJK comma, full stop
    if (cp >= 0x3008 && cp <= 0x3011) return true;  // CJK brackets
    if (cp >= 0x3014 && cp <= 0x301f) return true;
    if (cp >= 0xfe50 && cp <= 0xfe6b) return true;  // small form variants
    if (cp >= 0xff01 && cp <= 0xff0f) return true;  // fullwidth ! to /
    if (cp >= 0xff1a && cp <= 0xff20) return true;
    if (cp >= 0xff3b && cp <= 0xff3f) return true;
    if (cp >= 0xff5b && cp <= 0xff65) return true;
    return false;
}

bool is_currency_cp(char32_t cp) {
    if (cp == U'$') return true;
    if (cp >= 0x00a2 && cp <= 0x00a5) return true;  // cent, pound, currency, yen
    if (cp >= 0x20a0 && cp <= 0x20bf) return true;  // currency symbols block
    if (cp == 0xfe69 || cp == 0xff04) return true;
    if (cp == 0xffe0 || cp == 0xffe1 || cp == 0xffe5 || cp == 0xffe6) return true;
    return false;
}

char32_t to_lower_cp(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
    if (cp >= 0x00c0 && cp <= 0x00de && cp != 0x00d7) return cp + 0x20;  // Latin-1
    return cp;
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

bool is_url_token(std::string_view tok) {
    return starts_with(tok, "http://") || starts_with(tok, "https://") ||
           starts_with(tok, "www.");
}

std::string strip_punct(std::string_view tok) {
    std::string out;
    out.reserve(tok.size());
    std::size_t i = 0;
    while (i < tok.size()) {
        const char32_t cp = next_codepoint(tok, i);
        if (!is_punct_cp(cp)) append_codepoint(out, cp);
    }
    return out;
}

bool all_ascii_digits(std::string_view tok) {
    if (tok.empty()) return false;
    return std::all_of(tok.begin(), tok.end(),
                       [](char c) { return c >= '0' && c <= '9'; });
}

bool first_cp_is_currency(std::string_view tok) {
    std::size_t i = 0;
    return !tok.empty() && is_currency_cp(next_codepoint(tok, i));
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower_ascii(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c += 0x20;
    return s;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view raw_text) {
    std::vector<std::string> out;
    std::string current;
    std::size_t i = 0;

    auto flush = [&]() {
        if (current.empty()) return;
        std::string tok;
        tok.swap(current);
        // URL detection runs on the raw whitespace-delimited token, before
        // punctuation stripping destroys the scheme separators.
        if (is_url_token(tok)) return;
        const std::string stripped = strip_punct(tok);
        if (stripped.empty()) return;
        if (first_cp_is_currency(stripped)) return;
        if (all_ascii_digits(stripped)) return;
        out.push_back(stripped);
    };

    while (i < raw_text.size()) {
        const char32_t cp = next_codepoint(raw_text, i);
        if (is_space_cp(cp)) {
            flush();
        } else {
            append_codepoint(current, to_lower_cp(cp));
        }
    }
    flush();
    return out;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopwordList& stops) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens)
        if (!stops.contains(t)) out.push_back(t);
    return out;
}

StopwordList StopwordList::from_words(std::span<const std::string> words) {
    StopwordList list;
    for (const auto& w : words) {
        const std::string lw = lower_ascii(trim(w));
        if (!lw.empty()) list.words_.insert(lw);
    }
    return list;
}

StopwordList StopwordList::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open stopword file: " + path.string());
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) words.push_back(line);
    return from_words(words);
}

StopwordList StopwordList::builtin_english() {
    StopwordList list;
    for (std::string_view w : builtin_stopwords()) list.words_.insert(std::string(w));
    return list;
}

Corpus load_corpus(const std::filesystem::path& directory,
                   const std::optional<std::filesystem::path>& label_manifest,
                   const StopwordList& stops) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(directory))
        throw IoError("corpus directory not found: " + directory.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

    Corpus corpus;
    corpus.name = directory.filename().string();
    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot read document: " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        Document doc;
        doc.id = path.filename().string();
        doc.tokens = remove_stopwords(tokenize(buf.str()), stops);
        corpus.documents.push_back(std::move(doc));
    }

    if (label_manifest) {
        std::ifstream in(*label_manifest);
        if (!in) throw IoError("cannot open label manifest: " + label_manifest->string());
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (trim(line).empty()) continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw ValidationError("label manifest line " + std::to_string(lineno) +
                                      " is not `filename<TAB>label`");
            const std::string fname = trim(line.substr(0, tab));
            const std::string value = trim(line.substr(tab + 1));
            double label = 0.0;
            try {
                std::size_t used = 0;
                label = std::stod(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw ValidationError("label manifest line " + std::to_string(lineno) +
                                      ": cannot parse label \"" + value + "\"");
            }
            if (!std::isfinite(label))
                throw ValidationError("label manifest line " + std::to_string(lineno) +
                                      ": label is not finite");
            auto it = std::find_if(corpus.documents.begin(), corpus.documents.end(),
                                   [&](const Document& d) { return d.id == fname; });
            if (it == corpus.documents.end())
                throw ValidationError("label manifest names missing file: \"" + fname + "\"");
            it->label = label;
        }
    }
    return corpus;
}

}  // namespace readlm::text
