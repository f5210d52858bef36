#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include "geosocial/common/clock.hpp"
#include "geosocial/common/result.hpp"
#include "geosocial/domain/model.hpp"
#include "geosocial/storage/store.hpp"

namespace geosocial {

inline constexpr std::string_view kWelcomeText = "welldone, you are good to go";
inline constexpr std::string_view kBadCredentialsText = "wrong email address or password";

struct AuthConfig {
    std::chrono::hours session_ttl{24};
    // PBKDF2-HMAC-SHA256 work factor for new credentials.
    int pbkdf2_iterations = 120'000;
};

struct SignupResult {
    UserId user_id;
    std::string welcome_text;
};

struct SessionToken {
    std::string token;  // 256 random bits, hex encoded
    UserId user_id;
    Timestamp issued_at;
    Timestamp expires_at;
};

// Salted PBKDF2 digest; the plaintext is never kept.
CredentialRecord make_credential(UserId user, std::string_view password, int iterations);
bool verify_password(const CredentialRecord& cred, std::string_view password);

std::string random_hex(std::size_t bytes);
std::string sha256_hex(std::string_view data);

class AuthService {
public:
    AuthService(std::shared_ptr<Store> store, std::shared_ptr<const Clock> clock,
                AuthConfig config = {});

    // Persists profile and credential in one transaction.
    Result<SignupResult> signup(const SignupFields& fields);

    // Unknown email and wrong password produce the same error, byte for byte.
    Result<SessionToken> login(std::string_view email, std::string_view password);

    Result<UserId> verify_session(std::string_view token);

    const AuthConfig& config() const noexcept { return config_; }

private:
    std::shared_ptr<Store> store_;
    std::shared_ptr<const Clock> clock_;
    AuthConfig config_;
    CredentialRecord decoy_;
};

Error bad_credentials_error();

}  // namespace geosocial
