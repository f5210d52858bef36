#include "geosocial/auth/auth.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <stdexcept>

namespace geosocial {

namespace {

constexpr std::size_t kSaltBytes = 16;
constexpr std::size_t kDigestBytes = 32;
constexpr std::size_t kTokenBytes = 32;

std::string random_bytes(std::size_t n) {
    std::string out(n, '\0');
    if (RAND_bytes(reinterpret_cast<unsigned char*>(out.data()), static_cast<int>(n)) != 1)
        throw std::runtime_error("RAND_bytes failed");
    return out;
}

std::string to_hex(std::string_view bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char c : bytes) {
        out += kDigits[c >> 4];
        out += kDigits[c & 0xf];
    }
    return out;
}

std::string pbkdf2(std::string_view password, std::string_view salt, int iterations) {
    std::string out(kDigestBytes, '\0');
    if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()),
                          reinterpret_cast<const unsigned char*>(salt.data()),
                          static_cast<int>(salt.size()), iterations, EVP_sha256(),
                          static_cast<int>(out.size()),
                          reinterpret_cast<unsigned char*>(out.data())) != 1)
        throw std::runtime_error("PBKDF2 failed");
    return out;
}

}  // namespace

Error bad_credentials_error() {
    return {ErrorCode::bad_credentials, std::string(kBadCredentialsText)};
}

std::string random_hex(std::size_t bytes) { return to_hex(random_bytes(bytes)); }

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    return to_hex(std::string_view(reinterpret_cast<const char*>(md), len));
}

CredentialRecord make_credential(UserId user, std::string_view password, int iterations) {
    auto salt = random_bytes(kSaltBytes);
    auto digest = pbkdf2(password, salt, iterations);
    return {user, std::move(salt), std::move(digest), iterations};
}

bool verify_password(const CredentialRecord& cred, std::string_view password) {
    const auto digest = pbkdf2(password, cred.salt, cred.iterations);
    return digest.size() == cred.digest.size() &&
           CRYPTO_memcmp(digest.data(), cred.digest.data(), digest.size()) == 0;
}

AuthService::AuthService(std::shared_ptr<Store> store, std::shared_ptr<const Clock> clock,
                         AuthConfig config)
    : store_(std::move(store)),
      clock_(std::move(clock)),
      config_(config),
      decoy_(make_credential(UserId{}, random_hex(16), config.pbkdf2_iterations)) {}

Result<SignupResult> AuthService::signup(const SignupFields& fields) {
    auto profile = build_profile(fields, clock_->now());
    if (!profile) return profile.error();
    // Hash outside the write lock; PBKDF2 is deliberately slow.
    auto cred = make_credential(UserId{}, *fields.password, config_.pbkdf2_iterations);

    auto id = store_->transact([&](Transaction& tx) -> Result<UserId> {
        if (auto existing = tx.find_user_by_email(profile->email); existing)
            return Error{ErrorCode::duplicate_email, "email address is already registered"};
        else if (existing.code() != ErrorCode::not_found)
            return existing.error();
        auto uid = tx.put_user(*profile);
        if (!uid) {
            if (uid.code() == ErrorCode::constraint)
                return Error{ErrorCode::duplicate_email, "email address is already registered"};
            return uid.error();
        }
        cred.user_id = *uid;
        if (auto st = tx.put_credential(cred); !st) return st.error();
        return *uid;
    });
    if (!id) return id.error();
    return SignupResult{*id, std::string(kWelcomeText)};
}

Result<SessionToken> AuthService::login(std::string_view email, std::string_view password) {
    auto parsed = validate_email(email);
    auto cred = parsed ? store_->transact([&](Transaction& tx) -> Result<CredentialRecord> {
        auto user = tx.find_user_by_email(*parsed);
        if (!user) return user.error();
        return tx.get_credential(user->user_id);
    })
                       : Result<CredentialRecord>(Error{ErrorCode::not_found});
    if (!cred) {
        if (cred.code() != ErrorCode::not_found) return cred.error();
        // Same work as a real check, so timing does not reveal whether the email exists.
        (void)verify_password(decoy_, password);
        return bad_credentials_error();
    }
    if (!verify_password(*cred, password)) return bad_credentials_error();

    const auto now = clock_->now();
    SessionToken token{random_hex(kTokenBytes), cred->user_id, now, now + config_.session_ttl};
    auto st = store_->transact([&](Transaction& tx) {
        return tx.put_session(
            SessionRecord{sha256_hex(token.token), token.user_id, token.issued_at, token.expires_at});
    });
    if (!st) return st.error();
    return token;
}

Result<UserId> AuthService::verify_session(std::string_view token) {
    if (token.empty()) return Error{ErrorCode::invalid_token, "invalid session token"};
    const auto digest = sha256_hex(token);
    auto session = store_->transact([&](Transaction& tx) { return tx.get_session(digest); });
    if (!session) {
        if (session.code() == ErrorCode::not_found)
            return Error{ErrorCode::invalid_token, "invalid session token"};
        return session.error();
    }
    if (clock_->now() >= session->expires_at)
        return Error{ErrorCode::expired, "session has expired"};
    return session->user_id;
}

}  // namespace geosocial
