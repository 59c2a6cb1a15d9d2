#include "toml_subset.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "atomgraph/error.hpp"

namespace atomgraph::cli {

namespace {

using nlohmann::json;

class Parser {
  public:
    explicit Parser(const std::string& text) : s_(text) {}

    json run() {
        json root = json::object();
        json* table = &root;
        while (true) {
            skip_blank_lines();
            if (eof()) break;
            if (peek() == '[') {
                table = header(root);
            } else {
                const std::string key = parse_key();
                skip_ws();
                if (peek() == '.') error("dotted keys are not supported");
                expect('=');
                skip_ws();
                json v = value();
                if (table->contains(key)) error("duplicate key '" + key + "'");
                (*table)[key] = std::move(v);
            }
            end_of_line();
        }
        return root;
    }

  private:
    const std::string& s_;
    std::size_t i_ = 0;
    std::size_t line_ = 1;

    [[noreturn]] void error(const std::string& what) const {
        fail(Errc::invalid_argument, "config line " + std::to_string(line_) + ": " + what);
    }
    bool eof() const { return i_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[i_]; }
    char get() {
        if (eof()) error("unexpected end of input");
        const char c = s_[i_++];
        if (c == '\n') ++line_;
        return c;
    }
    void expect(char c) {
        if (peek() != c) error(std::string("expected '") + c + "'");
        get();
    }
    void skip_ws() {
        while (peek() == ' ' || peek() == '\t') get();
    }
    void skip_comment() {
        if (peek() == '#')
            while (!eof() && peek() != '\n') get();
    }
    // Whitespace, newlines and comments (inside arrays and between statements).
    void skip_blank_lines() {
        for (;;) {
            skip_ws();
            skip_comment();
            if (peek() == '\n' || peek() == '\r') {
                get();
                continue;
            }
            return;
        }
    }
    void end_of_line() {
        skip_ws();
        skip_comment();
        if (peek() == '\r') get();
        if (!eof() && peek() != '\n') error("unexpected text after value");
    }

    json* header(json& root) {
        get();
        const bool array = peek() == '[';
        if (array) get();
        skip_ws();
        std::vector<std::string> path{parse_key()};
        skip_ws();
        while (peek() == '.') {
            get();
            skip_ws();
            path.push_back(parse_key());
            skip_ws();
        }
        expect(']');
        if (array) expect(']');
        json* t = &root;
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
            json& next = (*t)[path[k]];
            if (next.is_null()) next = json::object();
            if (next.is_array()) {
                t = &next.back();
            } else if (next.is_object()) {
                t = &next;
            } else {
                error("'" + path[k] + "' is not a table");
            }
        }
        json& leaf = (*t)[path.back()];
        if (array) {
            if (leaf.is_null()) leaf = json::array();
            if (!leaf.is_array()) error("'" + path.back() + "' is not an array of tables");
            leaf.push_back(json::object());
            return &leaf.back();
        }
        if (!leaf.is_null()) error("table '" + path.back() + "' defined twice");
        leaf = json::object();
        return &leaf;
    }

    std::string parse_key() {
        if (peek() == '"' || peek() == '\'') return string_value();
        std::string k;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-') k += get();
        if (k.empty()) error("expected a key");
        return k;
    }

    std::string string_value() {
        const char q = get();
        if (peek() == q && i_ + 1 < s_.size() && s_[i_ + 1] == q) error("multi-line strings are not supported");
        std::string out;
        for (;;) {
            const char c = get();
            if (c == '\n') error("unterminated string");
            if (c == q) return out;
            if (c == '\\' && q == '"') {
                const char e = get();
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case 'r': out += '\r'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default: error(std::string("unsupported escape \\") + e);
                }
            } else {
                out += c;
            }
        }
    }

    json value() {
        const char c = peek();
        if (c == '"' || c == '\'') return string_value();
        if (c == '[') return array_value();
        if (c == '{') return inline_table();
        std::string tok;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || std::string_view("+-._").find(peek()) != std::string_view::npos))
            tok += get();
        if (tok.empty()) error("expected a value");
        if (tok == "true") return true;
        if (tok == "false") return false;
        return number(tok);
    }

    json number(std::string tok) {
        std::erase(tok, '_');
        std::string_view t = tok;
        const bool neg = !t.empty() && t[0] == '-';
        std::string_view body = (!t.empty() && (t[0] == '+' || t[0] == '-')) ? t.substr(1) : t;
        if (body == "inf") return neg ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
        if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (body.empty() || !std::isdigit(static_cast<unsigned char>(body[0]))) error("invalid value '" + tok + "'");
        const bool is_float = body.find_first_of(".eE") != std::string_view::npos;
        const char* b = tok.data() + (t[0] == '+' ? 1 : 0);
        const char* e = tok.data() + tok.size();
        if (!is_float) {
            std::int64_t v = 0;
            const auto r = std::from_chars(b, e, v);
            if (r.ec != std::errc() || r.ptr != e) error("invalid integer '" + tok + "'");
            return v;
        }
        double v = 0;
        const auto r = std::from_chars(b, e, v);
        if (r.ec != std::errc() || r.ptr != e) error("invalid number '" + tok + "'");
        return v;
    }

    json array_value() {
        get();
        json a = json::array();
        for (;;) {
            skip_blank_lines();
            if (peek() == ']') {
                get();
                return a;
            }
            a.push_back(value());
            skip_blank_lines();
            if (peek() == ',') {
                get();
            } else if (peek() != ']') {
                error("expected ',' or ']' in array");
            }
        }
    }

    json inline_table() {
        get();
        json t = json::object();
        skip_ws();
        if (peek() == '}') {
            get();
            return t;
        }
        for (;;) {
            skip_ws();
            const std::string key = parse_key();
            skip_ws();
            expect('=');
            skip_ws();
            if (t.contains(key)) error("duplicate key '" + key + "'");
            t[key] = value();
            skip_ws();
            if (peek() == '}') {
                get();
                return t;
            }
            expect(',');
        }
    }
};

}  // namespace

nlohmann::json parse_toml(const std::string& text) { return Parser(text).run(); }

}  // namespace atomgraph::cli
