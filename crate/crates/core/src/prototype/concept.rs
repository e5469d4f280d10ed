use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The ten predefined slide purposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalType {
    TitleMain,
    Agenda,
    SectionHeader,
    ContentTextOnly,
    ContentTextImageLeft,
    ContentTextImageRight,
    ContentImageOnly,
    ComparisonTable,
    KeyTakeaways,
    ThankYouContact,
}

impl FunctionalType {
    pub const ALL: [FunctionalType; 10] = [
        FunctionalType::TitleMain,
        FunctionalType::Agenda,
        FunctionalType::SectionHeader,
        FunctionalType::ContentTextOnly,
        FunctionalType::ContentTextImageLeft,
        FunctionalType::ContentTextImageRight,
        FunctionalType::ContentImageOnly,
        FunctionalType::ComparisonTable,
        FunctionalType::KeyTakeaways,
        FunctionalType::ThankYouContact,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FunctionalType::TitleMain => "title_main",
            FunctionalType::Agenda => "agenda",
            FunctionalType::SectionHeader => "section_header",
            FunctionalType::ContentTextOnly => "content_text_only",
            FunctionalType::ContentTextImageLeft => "content_text_image_left",
            FunctionalType::ContentTextImageRight => "content_text_image_right",
            FunctionalType::ContentImageOnly => "content_image_only",
            FunctionalType::ComparisonTable => "comparison_table",
            FunctionalType::KeyTakeaways => "key_takeaways",
            FunctionalType::ThankYouContact => "thank_you_contact",
        }
    }
}

impl fmt::Display for FunctionalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FunctionalType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        FunctionalType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown functional type `{s}`"))
    }
}

/// Planned content of one slide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlideConcept {
    pub slide_title: String,
    #[serde(default)]
    pub key_message: String,
    pub functional_type: FunctionalType,
    #[serde(default)]
    pub bullet_points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primary_visual_id: Option<String>,
    /// Width over height of the primary visual, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primary_visual_aspect: Option<f64>,
    #[serde(default)]
    pub source_unit_ids: Vec<String>,
}

impl SlideConcept {
    pub fn new(title: impl Into<String>, functional_type: FunctionalType) -> Self {
        SlideConcept {
            slide_title: title.into(),
            key_message: String::new(),
            functional_type,
            bullet_points: Vec::new(),
            primary_visual_id: None,
            primary_visual_aspect: None,
            source_unit_ids: Vec::new(),
        }
    }

    pub fn with_bullets<I, S>(mut self, bullets: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.bullet_points = bullets.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_visual(mut self, id: impl Into<String>, aspect: f64) -> Self {
        self.primary_visual_id = Some(id.into());
        self.primary_visual_aspect = Some(aspect);
        self
    }

    /// Non-fatal remarks about the concept, such as an overlong title.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let words = self.slide_title.split_whitespace().count();
        if words > 8 {
            out.push(format!("slide title has {words} words (more than 8)"));
        }
        if self.bullet_points.iter().any(|b| b.trim().is_empty()) {
            out.push("empty bullet point".to_string());
        }
        out
    }

    pub fn features(&self) -> ConceptFeatures {
        ConceptFeatures::of(self)
    }
}

/// Parses a concepts file: a JSON list of slide concepts.
pub fn concepts_from_json(bytes: &[u8]) -> Result<Vec<SlideConcept>, String> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        format!("{path}: {}", e.into_inner())
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointsBucket {
    Few,
    Medium,
    Many,
}

impl PointsBucket {
    /// 0–3 points are `few`, 4–6 `medium`, more `many`.
    pub fn of(n: usize) -> Self {
        match n {
            0..=3 => PointsBucket::Few,
            4..=6 => PointsBucket::Medium,
            _ => PointsBucket::Many,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AspectBucket {
    Wide,
    Square,
    Tall,
    None,
}

impl AspectBucket {
    pub fn of(aspect: Option<f64>) -> Self {
        match aspect {
            None => AspectBucket::None,
            Some(a) if a > 1.2 => AspectBucket::Wide,
            Some(a) if a < 0.83 => AspectBucket::Tall,
            Some(_) => AspectBucket::Square,
        }
    }
}

pub const NUM_CONDITIONS: usize = 120;

/// Categorical features a prototype is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConceptFeatures {
    pub functional_type: FunctionalType,
    pub points_bucket: PointsBucket,
    pub aspect_bucket: AspectBucket,
}

impl ConceptFeatures {
    pub fn new(ft: FunctionalType, points: PointsBucket, aspect: AspectBucket) -> Self {
        ConceptFeatures {
            functional_type: ft,
            points_bucket: points,
            aspect_bucket: aspect,
        }
    }

    pub fn of(concept: &SlideConcept) -> Self {
        let aspect = match (&concept.primary_visual_id, concept.primary_visual_aspect) {
            (None, _) => AspectBucket::None,
            // A visual of unknown shape is treated as square.
            (Some(_), None) => AspectBucket::Square,
            (Some(_), a) => AspectBucket::of(a),
        };
        ConceptFeatures::new(
            concept.functional_type,
            PointsBucket::of(concept.bullet_points.len()),
            aspect,
        )
    }

    /// `type × 12 + points × 4 + aspect`, in `[0, 120)`.
    pub fn condition_index(&self) -> usize {
        self.functional_type.index() * 12 + self.points_bucket as usize * 4 + self.aspect_bucket as usize
    }

    pub fn from_condition_index(c: usize) -> Option<Self> {
        if c >= NUM_CONDITIONS {
            return None;
        }
        let points = [PointsBucket::Few, PointsBucket::Medium, PointsBucket::Many][(c % 12) / 4];
        let aspect = [
            AspectBucket::Wide,
            AspectBucket::Square,
            AspectBucket::Tall,
            AspectBucket::None,
        ][c % 4];
        Some(ConceptFeatures::new(FunctionalType::ALL[c / 12], points, aspect))
    }

    pub fn all() -> impl Iterator<Item = ConceptFeatures> {
        (0..NUM_CONDITIONS).filter_map(ConceptFeatures::from_condition_index)
    }
}
