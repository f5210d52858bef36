#include "geosocial/social/social_graph.hpp"

#include <algorithm>
#include <cctype>

namespace geosocial {

namespace {

Error unknown_user() { return {ErrorCode::unknown_user, "no such user"}; }

// Returns unknown_user unless every id resolves.
Status require_users(Transaction& tx, std::initializer_list<UserId> ids) {
    for (auto id : ids) {
        auto exists = tx.user_exists(id);
        if (!exists) return exists.error();
        if (!*exists) return unknown_user();
    }
    return {};
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string fold_case(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

SocialGraph::SocialGraph(std::shared_ptr<Store> store, std::shared_ptr<const Clock> clock)
    : store_(std::move(store)), clock_(std::move(clock)) {}

Result<SearchResult> SocialGraph::search_profiles(std::string_view query, std::size_t limit) {
    const auto needle = fold_case(trim(query));
    if (needle.empty()) return Error{ErrorCode::empty_query, "search query is empty"};
    if (limit == 0) return Error{ErrorCode::invalid_argument, "limit must be positive"};

    auto users = store_->transact([](Transaction& tx) { return tx.list_users(); });
    if (!users) return users.error();

    std::vector<SearchMatch> matches;
    for (const auto& u : *users) {
        const auto name = u.display_name();
        if (fold_case(name).find(needle) != std::string::npos ||
            fold_case(u.email.str()).find(needle) != std::string::npos)
            matches.push_back({u.user_id, name, u.country});
    }
    std::sort(matches.begin(), matches.end(), [](const SearchMatch& a, const SearchMatch& b) {
        if (a.display_name != b.display_name) return a.display_name < b.display_name;
        return a.user_id < b.user_id;
    });
    if (matches.size() > limit) matches.resize(limit);
    return SearchResult{std::move(matches)};
}

Result<Friendship> SocialGraph::request_friend(UserId requester, UserId addressee) {
    if (requester == addressee)
        return Error{ErrorCode::self_friend, "cannot send a friend request to yourself"};
    return store_->transact([&](Transaction& tx) -> Result<Friendship> {
        if (auto st = require_users(tx, {requester, addressee}); !st) return st.error();
        if (auto existing = tx.get_friendship(requester, addressee); existing)
            return Error{ErrorCode::already_exists, "a friendship record already exists"};
        else if (existing.code() != ErrorCode::not_found)
            return existing.error();
        Friendship f{requester, addressee, FriendshipState::pending, clock_->now()};
        if (auto st = tx.insert_friendship(f); !st) {
            if (st.code() == ErrorCode::constraint)
                return Error{ErrorCode::already_exists, "a friendship record already exists"};
            return st.error();
        }
        return f;
    });
}

Result<Friendship> SocialGraph::respond_friend(UserId addressee, UserId requester, bool accept) {
    return store_->transact([&](Transaction& tx) -> Result<Friendship> {
        auto f = tx.get_friendship(addressee, requester);
        if (!f) {
            if (f.code() == ErrorCode::not_found)
                return Error{ErrorCode::not_pending, "no pending friend request"};
            return f.error();
        }
        if (f->addressee_id != addressee)
            return Error{ErrorCode::not_addressee, "only the addressee can respond"};
        if (f->state != FriendshipState::pending)
            return Error{ErrorCode::not_pending, "friend request is not pending"};
        f->state = accept ? FriendshipState::accepted : FriendshipState::rejected;
        f->updated_at = clock_->now();
        if (auto st = tx.update_friendship(*f); !st) return st.error();
        return *f;
    });
}

Result<bool> SocialGraph::is_friends(UserId a, UserId b) {
    if (a == b) return false;
    return store_->transact([&](Transaction& tx) -> Result<bool> {
        auto f = tx.get_friendship(a, b);
        if (!f) {
            if (f.code() == ErrorCode::not_found) return false;
            return f.error();
        }
        return f->state == FriendshipState::accepted;
    });
}

Result<std::vector<UserId>> SocialGraph::friends_of(UserId user) {
    return store_->transact([&](Transaction& tx) { return tx.list_friends(user); });
}

Result<PostId> SocialGraph::create_post(UserId author, std::string body,
                                        std::optional<std::string> media_ref) {
    if (media_ref && media_ref->empty()) media_ref.reset();
    if (trim(body).empty() && !media_ref)
        return Error{ErrorCode::empty, "a post needs text or a media reference"};
    return store_->transact([&](Transaction& tx) -> Result<PostId> {
        if (auto st = require_users(tx, {author}); !st) return st.error();
        return tx.put_post(Post{PostId{}, author, body, media_ref, clock_->now()});
    });
}

Result<std::vector<Post>> SocialGraph::list_posts(UserId author) {
    return store_->transact([&](Transaction& tx) -> Result<std::vector<Post>> {
        if (auto st = require_users(tx, {author}); !st) return st.error();
        return tx.list_posts(author);
    });
}

Result<Message> SocialGraph::send_message(UserId sender, UserId recipient, std::string body) {
    if (sender == recipient)
        return Error{ErrorCode::not_friends, "cannot message yourself"};
    return store_->transact([&](Transaction& tx) -> Result<Message> {
        auto f = tx.get_friendship(sender, recipient);
        if (!f && f.code() != ErrorCode::not_found) return f.error();
        if (!f || f->state != FriendshipState::accepted)
            return Error{ErrorCode::not_friends, "messages can only be sent to friends"};
        if (trim(body).empty()) return Error{ErrorCode::empty_body, "message body is empty"};
        return tx.append_message(sender, recipient, body, clock_->now());
    });
}

Result<ConversationView> SocialGraph::fetch_conversation(UserId viewer, UserId first,
                                                         UserId second, std::int64_t after_seq) {
    if (first == second || (viewer != first && viewer != second))
        return Error{ErrorCode::not_participant, "not a participant in this conversation"};
    return store_->transact([&](Transaction& tx) -> Result<ConversationView> {
        if (auto st = require_users(tx, {first, second}); !st) return st.error();
        auto messages = tx.list_messages(first, second, after_seq);
        if (!messages) return messages.error();
        return ConversationView{first, second, std::move(*messages)};
    });
}

}  // namespace geosocial
