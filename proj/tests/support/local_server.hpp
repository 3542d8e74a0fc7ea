#pragma once

// Same configuration as the library build.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <functional>
#include <string>
#include <thread>

namespace presuppose::testkit {

// httplib server on an ephemeral loopback port for the lifetime of the object.
class LocalServer {
public:
    explicit LocalServer(const std::function<void(httplib::Server&)>& setup)
    {
        setup(server_);
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~LocalServer()
    {
        server_.stop();
        thread_.join();
    }
    LocalServer(const LocalServer&) = delete;
    LocalServer& operator=(const LocalServer&) = delete;

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

}  // namespace presuppose::testkit
