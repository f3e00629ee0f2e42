#pragma once

#include <ostream>
#include <string_view>

#include <json.hpp>

namespace uncal {

/// Structured JSON-lines logger. Pipelines log one event per stage so runs are
/// traceable; tests capture the stream and assert stage order.
class Logger {
public:
    Logger() : out_(nullptr) {}
    explicit Logger(std::ostream& out) : out_(&out) {}

    void event(std::string_view step, nlohmann::json fields = nlohmann::json::object()) {
        if (!out_) return;
        fields["step"] = step;
        (*out_) << fields.dump() << "\n";
        out_->flush();
    }

private:
    std::ostream* out_;
};

}  // namespace uncal
