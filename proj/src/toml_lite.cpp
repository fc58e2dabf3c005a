#include "netcomp/toml_lite.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace netcomp {

namespace {

struct Cursor {
    const std::string& s;
    std::size_t i = 0;
    int line = 1;

    bool done() const { return i >= s.size(); }
    char peek() const { return s[i]; }
    char get() {
        char c = s[i++];
        if (c == '\n') ++line;
        return c;
    }
    void skip_ws_inline() {
        while (!done() && (peek() == ' ' || peek() == '\t')) ++i;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw std::runtime_error("toml: line " + std::to_string(line) + ": " + msg);
    }
};

std::string parse_basic_string(Cursor& c) {
    // c points at the opening quote
    const char quote = c.get();
    std::string out;
    while (!c.done()) {
        char ch = c.get();
        if (ch == quote) return out;
        if (ch == '\\' && quote == '"') {
            if (c.done()) c.fail("dangling escape");
            char e = c.get();
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: c.fail("unsupported escape");
            }
        } else if (ch == '\n') {
            c.fail("newline in string");
        } else {
            out += ch;
        }
    }
    c.fail("unterminated string");
}

nlohmann::json parse_value(Cursor& c);

nlohmann::json parse_array(Cursor& c) {
    c.get();  // '['
    nlohmann::json arr = nlohmann::json::array();
    while (true) {
        // arrays may span lines
        while (!c.done()) {
            c.skip_ws_inline();
            if (!c.done() && (c.peek() == '\n' || c.peek() == '\r')) { c.get(); continue; }
            if (!c.done() && c.peek() == '#') {
                while (!c.done() && c.peek() != '\n') c.get();
                continue;
            }
            break;
        }
        if (c.done()) c.fail("unterminated array");
        if (c.peek() == ']') { c.get(); return arr; }
        arr.push_back(parse_value(c));
        while (!c.done()) {
            c.skip_ws_inline();
            if (!c.done() && (c.peek() == '\n' || c.peek() == '\r')) { c.get(); continue; }
            if (!c.done() && c.peek() == '#') {
                while (!c.done() && c.peek() != '\n') c.get();
                continue;
            }
            break;
        }
        if (c.done()) c.fail("unterminated array");
        if (c.peek() == ',') { c.get(); continue; }
        if (c.peek() == ']') { c.get(); return arr; }
        c.fail("expected ',' or ']' in array");
    }
}

nlohmann::json parse_value(Cursor& c) {
    c.skip_ws_inline();
    if (c.done()) c.fail("missing value");
    const char ch = c.peek();
    if (ch == '"' || ch == '\'') return parse_basic_string(c);
    if (ch == '[') return parse_array(c);
    // bare token: bool or number
    std::string tok;
    while (!c.done()) {
        char t = c.peek();
        if (t == ',' || t == ']' || t == '#' || t == '\n' || t == '\r' || t == ' ' || t == '\t') break;
        tok += c.get();
    }
    if (tok == "true") return true;
    if (tok == "false") return false;
    if (tok.empty()) c.fail("missing value");
    try {
        std::size_t pos = 0;
        if (tok.find_first_of(".eE") == std::string::npos && tok.find("inf") == std::string::npos &&
            tok.find("nan") == std::string::npos) {
            long long v = std::stoll(tok, &pos);
            if (pos == tok.size()) return v;
        }
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) c.fail("bad number '" + tok + "'");
        return v;
    } catch (const std::exception&) {
        c.fail("bad value '" + tok + "'");
    }
}

std::string parse_key(Cursor& c) {
    c.skip_ws_inline();
    if (!c.done() && (c.peek() == '"' || c.peek() == '\'')) return parse_basic_string(c);
    std::string key;
    while (!c.done()) {
        char ch = c.peek();
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.') {
            key += c.get();
        } else {
            break;
        }
    }
    if (key.empty()) c.fail("expected key");
    return key;
}

nlohmann::json* descend(nlohmann::json& root, const std::string& dotted, Cursor& c) {
    nlohmann::json* node = &root;
    std::stringstream ss(dotted);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) c.fail("empty key segment");
        if (node->is_array()) node = &node->back();
        if (!node->contains(part)) (*node)[part] = nlohmann::json::object();
        node = &(*node)[part];
    }
    return node;
}

}  // namespace

nlohmann::json parse_toml(const std::string& text) {
    Cursor c{text};
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* current = &root;
    while (!c.done()) {
        c.skip_ws_inline();
        if (c.done()) break;
        char ch = c.peek();
        if (ch == '\n' || ch == '\r') { c.get(); continue; }
        if (ch == '#') {
            while (!c.done() && c.peek() != '\n') c.get();
            continue;
        }
        if (ch == '[') {
            c.get();
            bool array_of_tables = (!c.done() && c.peek() == '[');
            if (array_of_tables) c.get();
            std::string name = parse_key(c);
            c.skip_ws_inline();
            if (c.done() || c.get() != ']') c.fail("expected ']' after table name");
            if (array_of_tables && (c.done() || c.get() != ']')) c.fail("expected ']]' after table array name");
            nlohmann::json* node = descend(root, name, c);
            if (array_of_tables) {
                if (!node->is_array()) {
                    if (!node->is_object() || !node->empty()) c.fail("table array clashes with existing key");
                    *node = nlohmann::json::array();
                }
                node->push_back(nlohmann::json::object());
                current = &node->back();
            } else {
                if (!node->is_object()) c.fail("table clashes with existing key");
                current = node;
            }
            continue;
        }
        const std::string key = parse_key(c);
        c.skip_ws_inline();
        if (c.done() || c.get() != '=') c.fail("expected '=' after key '" + key + "'");
        nlohmann::json value = parse_value(c);
        nlohmann::json* slot = descend(*current, key, c);
        *slot = std::move(value);
        c.skip_ws_inline();
        if (!c.done() && c.peek() == '#')
            while (!c.done() && c.peek() != '\n') c.get();
        if (!c.done() && c.peek() != '\n' && c.peek() != '\r') c.fail("trailing characters after value");
    }
    return root;
}

nlohmann::json parse_toml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("toml: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_toml(ss.str());
}

}  // namespace netcomp
