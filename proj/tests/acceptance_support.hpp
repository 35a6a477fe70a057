#pragma once

// Shared scaffolding for the acceptance binaries: one pass/fail line per
// criterion, nonzero exit when anything failed.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

namespace acceptance {

class Suite {
  public:
    void run(const std::string& name, const std::function<bool(std::string&)>& body) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), secs,
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures_;
    }

    int exit_code() const {
        if (failures_ == 0) {
            std::printf("all criteria passed\n");
            return 0;
        }
        std::printf("%d criterion(s) failed\n", failures_);
        return 1;
    }

  private:
    int failures_ = 0;
};

inline std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

}  // namespace acceptance
