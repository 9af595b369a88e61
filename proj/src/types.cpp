#include "uwsn/types.hpp"

#include <stdexcept>

namespace uwsn {

std::string_view to_string(Role role) noexcept
{
    switch (role) {
    case Role::Sensor: return "sensor";
    case Role::Relay: return "relay";
    case Role::Sink: return "sink";
    }
    return "?";
}

std::string_view to_string(TransportFormatId tf) noexcept
{
    switch (tf) {
    case TransportFormatId::TF1: return "TF1";
    case TransportFormatId::TF2: return "TF2";
    case TransportFormatId::TF3: return "TF3";
    }
    return "?";
}

Role parse_role(std::string_view text)
{
    if (text == "sensor") return Role::Sensor;
    if (text == "relay") return Role::Relay;
    if (text == "sink") return Role::Sink;
    throw std::invalid_argument("unknown role '" + std::string(text) + "'");
}

TransportFormatId parse_transport_format(std::string_view text)
{
    if (text == "TF1" || text == "tf1" || text == "1") return TransportFormatId::TF1;
    if (text == "TF2" || text == "tf2" || text == "2") return TransportFormatId::TF2;
    if (text == "TF3" || text == "tf3" || text == "3") return TransportFormatId::TF3;
    throw std::invalid_argument("unknown transport format '" + std::string(text) + "'");
}

} // namespace uwsn
