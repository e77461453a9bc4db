#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

#include <json.hpp>

namespace depthmon::cli {

using nlohmann::json;

// Reads the keys of one JSON object into typed fields and rejects keys that
// were never asked for.
class Fields {
public:
    Fields(json j, std::string context) : j_(std::move(j)), context_(std::move(context)) {
        if (!j_.is_object()) {
            throw std::invalid_argument(context_ + ": expected a JSON object");
        }
    }

    template <typename T>
    void get(const std::string& key, T& out) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) {
            return;
        }
        try {
            if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
                if (!it->is_number_integer() || (!it->is_number_unsigned() && it->template get<std::int64_t>() < 0)) {
                    throw std::invalid_argument("expected a nonnegative integer");
                }
            }
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw std::invalid_argument(context_ + "." + key + ": wrong type");
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(context_ + "." + key + ": " + e.what());
        }
    }

    /// Applies `parse` to the value of `key` when present.
    template <typename F>
    void with(const std::string& key, F&& parse) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it != j_.end() && !it->is_null()) {
            parse(*it);
        }
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) {
                throw std::invalid_argument(context_ + ": unknown key '" + key + "'");
            }
        }
    }

private:
    json j_;
    std::string context_;
    std::set<std::string> seen_;
};

/// String value of `j`; `what` names the field in the error message.
std::string as_string(const json& j, const std::string& what);

}  // namespace depthmon::cli
