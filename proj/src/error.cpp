#include "fracflow/error.hpp"

#include <iostream>
#include <mutex>

namespace fracflow {

namespace {
std::mutex g_warn_mutex;
WarningHandler g_handler;
}  // namespace

WarningHandler set_warning_handler(WarningHandler h)
{
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    WarningHandler old = std::move(g_handler);
    g_handler = std::move(h);
    return old;
}

void warn(const std::string& msg)
{
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    if (g_handler)
        g_handler(msg);
    else
        std::cerr << "warning: " << msg << '\n';
}

}  // namespace fracflow
