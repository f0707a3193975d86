use super::{AnchorScope, Finding, Hit, Severity};
use crate::content::{ContentNode, Document};

fn has_captions(video: &ContentNode) -> bool {
    video.children.iter().any(|t| {
        t.is("track")
            && matches!(
                t.attr("kind").map(|k| k.trim().to_ascii_lowercase()).as_deref(),
                None | Some("captions" | "subtitles")
            )
    })
}

/// Presence of a captions track only; caption accuracy is not checked.
pub fn check_video_captions(doc: &Document) -> Vec<Finding> {
    doc.root
        .descendants()
        .filter(|n| n.is("video") && !has_captions(n))
        .map(|video| {
            Hit {
                rule_id: "video-captions",
                severity: Severity::Error,
                node: video,
                scope: AnchorScope::Content,
                message: "video has no captions track".into(),
                fix_hint: "Add <track kind=\"captions\" src=\"...\"> with reviewed captions.".into(),
            }
            .into_finding(doc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::test_support::page;

    #[test]
    fn captions_track() {
        assert_eq!(check_video_captions(&page(r#"<video src="v.mp4"></video>"#)).len(), 1);
        assert!(check_video_captions(&page(
            r#"<video src="v.mp4"><track kind="captions" src="c.vtt"></video>"#
        ))
        .is_empty());
        assert_eq!(
            check_video_captions(&page(r#"<video src="v.mp4"><track kind="chapters" src="c.vtt"></video>"#)).len(),
            1
        );
        assert!(check_video_captions(&page(r#"<audio src="a.mp3"></audio>"#)).is_empty());
    }
}
