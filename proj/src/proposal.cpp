#include "roundtable/proposal.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace roundtable {
namespace {

void write_fixed6(std::string& out, double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite number in proposal body");
    if (v == 0.0) v = 0.0;  // fold -0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
    std::string_view text(buf, static_cast<std::size_t>(res.ptr - buf));
    if (text == "-0.000000") text = "0.000000";
    out.append(text);
}

void write(std::string& out, const Json& v) {
    switch (v.type()) {
        case Json::value_t::object: {
            out.push_back('{');
            bool first = true;
            for (const auto& [key, item] : v.items()) {  // json objects iterate in key order
                if (!first) out.push_back(',');
                first = false;
                out.append(Json(key).dump());
                out.push_back(':');
                write(out, item);
            }
            out.push_back('}');
            break;
        }
        case Json::value_t::array: {
            out.push_back('[');
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out.push_back(',');
                write(out, v[i]);
            }
            out.push_back(']');
            break;
        }
        case Json::value_t::number_float: write_fixed6(out, v.get<double>()); break;
        default: out.append(v.dump()); break;
    }
}

}  // namespace

std::string canonical_json(const Json& value) {
    std::string out;
    write(out, value);
    return out;
}

}  // namespace roundtable
