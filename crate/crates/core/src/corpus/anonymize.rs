use std::sync::LazyLock;

use regex::{Captures, Regex};

// URLs first so `user@host` inside a URL is not read as an e-mail; e-mail
// before handles so the local part is not left behind.
static PII: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?P<url>[A-Za-z][A-Za-z0-9+.\-]*://\S+)|(?P<email>[^\s@]+@[^\s@]*\.\S*)|(?P<user>@[A-Za-z0-9_]+)",
    )
    .expect("valid regex")
});

pub const USER_TOKEN: &str = "<USER>";
pub const URL_TOKEN: &str = "<URL>";
pub const EMAIL_TOKEN: &str = "<EMAIL>";

/// Replaces @-handles, URLs and e-mail addresses with `<USER>`, `<URL>` and
/// `<EMAIL>`. Everything else is left byte-identical.
pub fn anonymize_text(s: &str) -> String {
    PII.replace_all(s, |caps: &Captures<'_>| {
        if caps.name("url").is_some() {
            URL_TOKEN
        } else if caps.name("email").is_some() {
            EMAIL_TOKEN
        } else {
            USER_TOKEN
        }
    })
    .into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn handle_and_email() {
        assert_eq!(
            anonymize_text("ask @john at john@x.com"),
            "ask <USER> at <EMAIL>"
        );
    }

    #[test]
    fn plain_text_unchanged() {
        assert_eq!(anonymize_text("I feel low today"), "I feel low today");
    }

    #[test]
    fn url() {
        assert_eq!(anonymize_text("see http://a.b/c now"), "see <URL> now");
        assert_eq!(anonymize_text("https://x.org/u@v.w"), "<URL>");
    }

    #[test]
    fn unicode_preserved() {
        assert_eq!(anonymize_text("ça va @zoé? 😢"), "ça va <USER>é? 😢");
    }

    proptest! {
        #[test]
        fn idempotent(s in "[a-z@:/._ <>A-Z0-9]{0,40}") {
            let once = anonymize_text(&s);
            prop_assert_eq!(anonymize_text(&once), once);
        }
    }
}
