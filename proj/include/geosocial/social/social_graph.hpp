#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geosocial/common/clock.hpp"
#include "geosocial/common/result.hpp"
#include "geosocial/domain/model.hpp"
#include "geosocial/storage/store.hpp"

namespace geosocial {

struct SearchMatch {
    UserId user_id;
    std::string display_name;
    std::string country;

    friend bool operator==(const SearchMatch&, const SearchMatch&) = default;
};

struct SearchResult {
    std::vector<SearchMatch> matches;
};

struct ConversationView {
    UserId first;
    UserId second;
    std::vector<Message> messages;  // ascending seq, gap-free from 1
};

// Profile search, friendships, posts and chat on top of the store.
class SocialGraph {
public:
    SocialGraph(std::shared_ptr<Store> store, std::shared_ptr<const Clock> clock);

    // Case-insensitive substring over display name and email, ordered by
    // display name then id.
    Result<SearchResult> search_profiles(std::string_view query, std::size_t limit);

    Result<Friendship> request_friend(UserId requester, UserId addressee);
    Result<Friendship> respond_friend(UserId addressee, UserId requester, bool accept);
    Result<bool> is_friends(UserId a, UserId b);
    Result<std::vector<UserId>> friends_of(UserId user);

    Result<PostId> create_post(UserId author, std::string body,
                               std::optional<std::string> media_ref = std::nullopt);
    Result<std::vector<Post>> list_posts(UserId author);

    // Chat is limited to accepted friends.
    Result<Message> send_message(UserId sender, UserId recipient, std::string body);
    Result<ConversationView> fetch_conversation(UserId viewer, UserId first, UserId second,
                                                std::int64_t after_seq = 0);
    Result<ConversationView> fetch_conversation(UserId user, UserId other) {
        return fetch_conversation(user, user, other);
    }

private:
    std::shared_ptr<Store> store_;
    std::shared_ptr<const Clock> clock_;
};

// ASCII case folding; non-ASCII bytes compare as-is.
std::string fold_case(std::string_view s);

}  // namespace geosocial
