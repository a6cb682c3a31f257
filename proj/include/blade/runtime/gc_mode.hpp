#pragma once

#include <optional>
#include <string_view>

namespace blade::runtime
{
    /// The three compared configurations: default collector, collector disabled,
    /// and application-coordinated collection.
    enum class GcMode
    {
        On,
        Off,
        Blade,
    };

    constexpr std::string_view to_string(GcMode m) noexcept
    {
        switch (m)
        {
        case GcMode::On:
            return "gc-on";
        case GcMode::Off:
            return "gc-off";
        case GcMode::Blade:
            return "blade";
        }
        return "?";
    }

    /// Accepts "on", "off", "blade" and the gc-on / gc-off spellings.
    inline std::optional<GcMode> parse_gc_mode(std::string_view s) noexcept
    {
        if (s == "on" || s == "gc-on")
        {
            return GcMode::On;
        }
        if (s == "off" || s == "gc-off")
        {
            return GcMode::Off;
        }
        if (s == "blade")
        {
            return GcMode::Blade;
        }
        return std::nullopt;
    }
}
