#include <httplib.h>

#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <fcntl.h>

#include <openssl/err.h>
#include <openssl/ssl.h>
#include <openssl/x509v3.h>

#include <cerrno>
#include <cstring>
#include <chrono>
#include <memory>

#include "vapt/http/transport.hpp"
#include "vapt/http/url.hpp"

namespace vapt::http {

namespace {

bool looks_like_ip(const std::string& host)
{
    if (!host.empty() && host.front() == '[')
        return true;
    return host.find_first_not_of("0123456789.") == std::string::npos;
}

std::string strip_brackets(const std::string& host)
{
    if (host.size() >= 2 && host.front() == '[' && host.back() == ']')
        return host.substr(1, host.size() - 2);
    return host;
}

class Socket {
public:
    explicit Socket(int fd = -1) : fd_(fd) {}
    ~Socket()
    {
        if (fd_ >= 0)
            ::close(fd_);
    }
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    [[nodiscard]] int get() const { return fd_; }

private:
    int fd_;
};

int connect_with_timeout(const std::string& host, int port, std::chrono::milliseconds timeout, std::string& error)
{
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    auto port_text = std::to_string(port);
    if (int rc = ::getaddrinfo(strip_brackets(host).c_str(), port_text.c_str(), &hints, &result); rc != 0) {
        error = std::string("resolve failed: ") + ::gai_strerror(rc);
        return -1;
    }
    std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(result, ::freeaddrinfo);

    for (auto* ai = result; ai != nullptr; ai = ai->ai_next) {
        int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0)
            continue;
        int flags = ::fcntl(fd, F_GETFL, 0);
        ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
        int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
        if (rc < 0 && errno == EINPROGRESS) {
            pollfd pfd{fd, POLLOUT, 0};
            int ready = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
            if (ready == 1) {
                int so_error = 0;
                socklen_t len = sizeof(so_error);
                ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &so_error, &len);
                rc = so_error == 0 ? 0 : -1;
                if (so_error != 0)
                    errno = so_error;
            } else {
                rc = -1;
                if (ready == 0)
                    errno = ETIMEDOUT;
            }
        }
        if (rc == 0) {
            ::fcntl(fd, F_SETFL, flags);
            timeval tv{};
            tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
            tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
            ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
            ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
            return fd;
        }
        error = std::string("connect failed: ") + std::strerror(errno);
        ::close(fd);
    }
    if (error.empty())
        error = "connect failed";
    return -1;
}

class NetworkTransport final : public Transport {
public:
    ExchangeResult exchange(const HttpRequest& request, std::chrono::milliseconds timeout,
                            std::size_t max_body_bytes) override
    {
        auto url = Url::parse(request.url);
        if (!url)
            return TransportError{"invalid URL: " + request.url};

        httplib::Client client(url->origin());
        client.enable_server_certificate_verification(false);
        client.set_follow_location(false);
        client.set_keep_alive(false);
        // Request URLs arrive already percent-encoded.
        client.set_url_encode(false);
        auto secs = static_cast<time_t>(timeout.count() / 1000);
        auto usecs = static_cast<time_t>((timeout.count() % 1000) * 1000);
        client.set_connection_timeout(secs, usecs);
        client.set_read_timeout(secs, usecs);
        client.set_write_timeout(secs, usecs);

        httplib::Request req;
        req.method = request.method;
        req.path = url->path_and_query();
        for (const auto& [name, value] : request.headers)
            req.headers.emplace(name, value);
        if (!request.body.empty()) {
            req.body = request.body;
            if (!header_value(request.headers, "Content-Type"))
                req.headers.emplace("Content-Type", "application/x-www-form-urlencoded");
        }

        std::string body;
        bool truncated = false;
        req.content_receiver = [&](const char* data, std::size_t len, std::uint64_t, std::uint64_t) {
            std::size_t room = max_body_bytes - body.size();
            if (len > room) {
                body.append(data, room);
                truncated = true;
                return false;
            }
            body.append(data, len);
            return true;
        };

        httplib::Response res;
        httplib::Error err = httplib::Error::Success;
        auto start = std::chrono::steady_clock::now();
        bool ok = client.send(req, res, err);
        auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);

        if (!ok && !(truncated && res.status > 0))
            return TransportError{httplib::to_string(err)};

        HttpResponse out;
        out.status = res.status;
        for (const auto& [name, value] : res.headers)
            out.headers.emplace_back(name, value);
        out.body = std::move(body);
        out.truncated = truncated;
        out.elapsed_ms = elapsed.count();
        return out;
    }

    TlsHandshake handshake(const std::string& host, int port, std::chrono::milliseconds timeout) override
    {
        TlsHandshake result;
        Socket socket(connect_with_timeout(host, port, timeout, result.error));
        if (socket.get() < 0)
            return result;

        std::unique_ptr<SSL_CTX, decltype(&::SSL_CTX_free)> ctx(SSL_CTX_new(TLS_client_method()), ::SSL_CTX_free);
        if (!ctx) {
            result.error = "SSL_CTX_new failed";
            return result;
        }
        // Legacy protocol versions must be negotiable for the probe to report them.
        SSL_CTX_set_security_level(ctx.get(), 0);
        SSL_CTX_set_min_proto_version(ctx.get(), TLS1_VERSION);
        SSL_CTX_set_default_verify_paths(ctx.get());
        SSL_CTX_set_verify(ctx.get(), SSL_VERIFY_NONE, nullptr);

        std::unique_ptr<SSL, decltype(&::SSL_free)> ssl(SSL_new(ctx.get()), ::SSL_free);
        SSL_set_fd(ssl.get(), socket.get());
        if (!looks_like_ip(host))
            SSL_set_tlsext_host_name(ssl.get(), host.c_str());
        if (SSL_connect(ssl.get()) != 1) {
            char buf[256];
            ERR_error_string_n(ERR_get_error(), buf, sizeof(buf));
            result.error = std::string("handshake failed: ") + buf;
            return result;
        }
        result.connected = true;
        result.protocol = SSL_get_version(ssl.get());

        std::unique_ptr<X509, decltype(&::X509_free)> cert(SSL_get1_peer_certificate(ssl.get()), ::X509_free);
        if (cert) {
            result.certificate_valid = SSL_get_verify_result(ssl.get()) == X509_V_OK;
            auto name = strip_brackets(host);
            if (looks_like_ip(host))
                result.host_match = X509_check_ip_asc(cert.get(), name.c_str(), 0) == 1;
            else
                result.host_match = X509_check_host(cert.get(), name.c_str(), name.size(), 0, nullptr) == 1;
        }
        SSL_shutdown(ssl.get());
        return result;
    }
};

} // namespace

std::shared_ptr<Transport> make_network_transport() { return std::make_shared<NetworkTransport>(); }

} // namespace vapt::http
