// Best-effort PDF text recovery. Handles the common case of text drawn with
// Tj/TJ/'/" inside BT..ET objects in uncompressed or FlateDecode content
// streams. Fonts with custom encodings, object streams and layout analysis
// are deliberately not attempted.

#include <cctype>
#include <string>
#include <vector>

#include <zlib.h>

#include "ideation/docproc/document.hpp"
#include "ideation/error.hpp"
#include "ideation/text.hpp"

namespace ideation::docproc {

namespace {

bool inflate_stream(std::string_view in, std::string& out) {
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK) return false;
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
    zs.avail_in = static_cast<uInt>(in.size());
    char buf[16384];
    int rc = Z_OK;
    while (rc == Z_OK) {
        zs.next_out = reinterpret_cast<Bytef*>(buf);
        zs.avail_out = sizeof buf;
        rc = inflate(&zs, Z_NO_FLUSH);
        out.append(buf, sizeof buf - zs.avail_out);
    }
    inflateEnd(&zs);
    return rc == Z_STREAM_END;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// PDF string bytes -> UTF-8 (UTF-16BE with BOM, otherwise Latin-1).
std::string decode_pdf_bytes(const std::string& raw) {
    std::string out;
    if (raw.size() >= 2 && static_cast<unsigned char>(raw[0]) == 0xFE &&
        static_cast<unsigned char>(raw[1]) == 0xFF) {
        for (std::size_t i = 2; i + 1 < raw.size(); i += 2) {
            std::uint32_t cp = (static_cast<unsigned char>(raw[i]) << 8) |
                               static_cast<unsigned char>(raw[i + 1]);
            if (cp >= 0xD800 && cp <= 0xDBFF && i + 3 < raw.size()) {
                std::uint32_t lo = (static_cast<unsigned char>(raw[i + 2]) << 8) |
                                   static_cast<unsigned char>(raw[i + 3]);
                cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
                i += 2;
            }
            append_utf8(out, cp);
        }
        return out;
    }
    for (unsigned char c : raw) append_utf8(out, c);
    return out;
}

class ContentScanner {
public:
    explicit ContentScanner(std::string_view s) : s_(s) {}

    // Returns the text of every BT..ET object, one string per object.
    std::vector<std::string> text_objects() {
        std::vector<std::string> objects;
        std::string current;
        std::vector<std::string> operands;
        bool in_text = false;
        while (skip_ws(), pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == '%') {
                while (pos_ < s_.size() && s_[pos_] != '\n' && s_[pos_] != '\r') ++pos_;
            } else if (c == '(') {
                operands.push_back(decode_pdf_bytes(literal()));
            } else if (c == '<' && pos_ + 1 < s_.size() && s_[pos_ + 1] != '<') {
                operands.push_back(decode_pdf_bytes(hex()));
            } else if (c == '[') {
                operands.push_back(array());
            } else if (c == '<' || c == '>' || c == ']' || c == '{' || c == '}' || c == '/') {
                ++pos_;
                if (c == '/') word();
            } else {
                auto w = word();
                if (w.empty()) {
                    ++pos_;
                    continue;
                }
                if (std::isdigit(static_cast<unsigned char>(w[0])) || w[0] == '-' || w[0] == '+' ||
                    w[0] == '.') {
                    operands.push_back({});
                    continue;
                }
                if (w == "BT") {
                    in_text = true;
                    current.clear();
                } else if (w == "ET") {
                    if (in_text && !text::trim(current).empty()) objects.push_back(current);
                    in_text = false;
                } else if (in_text && (w == "Tj" || w == "TJ")) {
                    if (!operands.empty()) current += operands.back();
                } else if (in_text && (w == "'" || w == "\"")) {
                    current += '\n';
                    if (!operands.empty()) current += operands.back();
                } else if (in_text && (w == "T*" || w == "Td" || w == "TD")) {
                    if (!current.empty() && current.back() != '\n') current += '\n';
                }
                operands.clear();
            }
        }
        return objects;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    std::string word() {
        auto start = pos_;
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '<' ||
                c == '>' || c == '[' || c == ']' || c == '/' || c == '%' || c == '{' || c == '}')
                break;
            ++pos_;
        }
        return std::string(s_.substr(start, pos_ - start));
    }

    std::string literal() {
        std::string out;
        int depth = 0;
        ++pos_;  // '('
        while (pos_ < s_.size()) {
            char c = s_[pos_++];
            if (c == '\\' && pos_ < s_.size()) {
                char e = s_[pos_++];
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 'r': out += '\r'; break;
                    case 't': out += '\t'; break;
                    case 'b': out += '\b'; break;
                    case 'f': out += '\f'; break;
                    case '\r':
                        if (pos_ < s_.size() && s_[pos_] == '\n') ++pos_;
                        break;
                    case '\n': break;
                    default:
                        if (e >= '0' && e <= '7') {
                            int v = e - '0';
                            for (int k = 0; k < 2 && pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '7'; ++k)
                                v = v * 8 + (s_[pos_++] - '0');
                            out += static_cast<char>(v & 0xFF);
                        } else {
                            out += e;
                        }
                }
            } else if (c == '(') {
                ++depth;
                out += c;
            } else if (c == ')') {
                if (depth-- == 0) break;
                out += c;
            } else {
                out += c;
            }
        }
        return out;
    }

    std::string hex() {
        ++pos_;  // '<'
        std::string digits;
        while (pos_ < s_.size() && s_[pos_] != '>') {
            if (std::isxdigit(static_cast<unsigned char>(s_[pos_]))) digits += s_[pos_];
            ++pos_;
        }
        ++pos_;
        if (digits.size() % 2) digits += '0';
        std::string out;
        for (std::size_t i = 0; i < digits.size(); i += 2)
            out += static_cast<char>(std::stoi(digits.substr(i, 2), nullptr, 16));
        return out;
    }

    // TJ array: concatenated strings; large negative kerning becomes a space.
    std::string array() {
        ++pos_;  // '['
        std::string out;
        while (skip_ws(), pos_ < s_.size() && s_[pos_] != ']') {
            char c = s_[pos_];
            if (c == '(') {
                out += decode_pdf_bytes(literal());
            } else if (c == '<') {
                out += decode_pdf_bytes(hex());
            } else {
                auto w = word();
                if (w.empty()) {
                    ++pos_;
                    continue;
                }
                try {
                    if (std::stod(w) < -200.0 && !out.empty() && out.back() != ' ') out += ' ';
                } catch (const std::exception&) {
                }
            }
        }
        ++pos_;
        return out;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string extract_pdf_text(std::string_view bytes) {
    std::vector<std::string> paragraphs;
    std::size_t pos = 0;
    while (true) {
        auto kw = bytes.find("stream", pos);
        if (kw == std::string_view::npos) break;
        if (kw >= 3 && bytes.substr(kw - 3, 3) == "end") {
            pos = kw + 6;
            continue;
        }
        auto dict_start = bytes.rfind("<<", kw);
        std::string_view dict = dict_start == std::string_view::npos
                                    ? std::string_view{}
                                    : bytes.substr(dict_start, kw - dict_start);
        auto data = kw + 6;
        if (data < bytes.size() && bytes[data] == '\r') ++data;
        if (data < bytes.size() && bytes[data] == '\n') ++data;
        auto end = bytes.find("endstream", data);
        if (end == std::string_view::npos) break;
        auto raw = bytes.substr(data, end - data);
        pos = end + 9;

        std::string content;
        if (dict.find("/FlateDecode") != std::string_view::npos) {
            if (!inflate_stream(raw, content)) continue;
        } else if (dict.find("/Filter") != std::string_view::npos) {
            continue;  // other filters (images, DCT, LZW) carry no recoverable text
        } else {
            content.assign(raw);
        }
        for (auto& obj : ContentScanner(content).text_objects()) paragraphs.push_back(std::move(obj));
    }
    if (paragraphs.empty()) fail(ErrorCode::ParseError, "no extractable text in PDF");
    std::string out;
    for (const auto& p : paragraphs) {
        auto t = text::trim(p);
        if (t.empty()) continue;
        if (!out.empty()) out += "\n\n";
        out += t;
    }
    if (!text::is_valid_utf8(out)) fail(ErrorCode::ParseError, "PDF text is not decodable");
    return out;
}

}  // namespace ideation::docproc
