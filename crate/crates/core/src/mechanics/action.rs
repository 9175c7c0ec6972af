//! The ten-action grammar. Text form is `name(param=value, ...)`; printing
//! always uses keyword arguments and double-quoted strings.

use crate::world::commands::{split_call, Scalar};
use crate::world::state::{Direction, MenuKind};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const MAX_SLOT: usize = 35;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flow {
    In,
    Out,
}

impl Flow {
    pub fn name(self) -> &'static str {
        match self {
            Flow::In => "in",
            Flow::Out => "out",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MenuOp {
    Open,
    Close,
}

/// Menus an agent may name in `menu(...)`.
pub const MENU_NAMES: [MenuKind; 8] = [
    MenuKind::Dialogue,
    MenuKind::Shop,
    MenuKind::Crafting,
    MenuKind::Animals,
    MenuKind::Building,
    MenuKind::QuestLog,
    MenuKind::Map,
    MenuKind::Shipping,
];

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    Move {
        x: i32,
        y: i32,
    },
    Use {
        direction: Direction,
    },
    Interact {
        direction: Direction,
    },
    ChooseItem {
        slot_index: usize,
    },
    AttachItem {
        slot_index: usize,
    },
    DetachItem,
    Craft {
        item: String,
    },
    ChooseOption {
        option_index: usize,
        quantity: Option<u32>,
        direction: Option<Flow>,
    },
    Menu {
        option: MenuOp,
        menu_name: MenuKind,
    },
    Navigate {
        name: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{0}")]
    Syntax(String),
    #[error("unknown action {0:?}")]
    UnknownAction(String),
    #[error("{action}: {msg}")]
    Param { action: String, msg: String },
}

impl Action {
    pub fn kind(&self) -> &'static str {
        match self {
            Action::Move { .. } => "move",
            Action::Use { .. } => "use",
            Action::Interact { .. } => "interact",
            Action::ChooseItem { .. } => "choose_item",
            Action::AttachItem { .. } => "attach_item",
            Action::DetachItem => "detach_item",
            Action::Craft { .. } => "craft",
            Action::ChooseOption { .. } => "choose_option",
            Action::Menu { .. } => "menu",
            Action::Navigate { .. } => "navigate",
        }
    }

    pub fn parse(src: &str) -> Result<Action, ParseError> {
        let (name, raw) = split_call(src).map_err(ParseError::Syntax)?;
        let canon = match name.as_str() {
            "unattach_item" => "detach_item",
            n => n,
        };
        let params: &[&str] = match canon {
            "move" => &["x", "y"],
            "use" | "interact" => &["direction"],
            "choose_item" | "attach_item" => &["slot_index"],
            "detach_item" => &[],
            "craft" => &["item"],
            "choose_option" => &["option_index", "quantity", "direction"],
            "menu" => &["option", "menu_name"],
            "navigate" => &["name"],
            _ => return Err(ParseError::UnknownAction(name)),
        };
        let err = |msg: String| ParseError::Param {
            action: canon.to_string(),
            msg,
        };
        if raw.len() > params.len() {
            return Err(err(format!("takes at most {} argument(s)", params.len())));
        }
        let mut slots: Vec<Option<Scalar>> = vec![None; params.len()];
        let mut keyed = false;
        for (i, (key, v)) in raw.into_iter().enumerate() {
            let idx = match key {
                Some(k) => {
                    keyed = true;
                    params
                        .iter()
                        .position(|p| *p == k)
                        .ok_or_else(|| err(format!("unknown parameter {k}")))?
                }
                None if keyed => return Err(err("positional argument after keyword".into())),
                None => i,
            };
            if slots[idx].is_some() {
                return Err(err(format!("{} given twice", params[idx])));
            }
            slots[idx] = Some(v);
        }
        let int = |i: usize| -> Result<i64, ParseError> {
            match &slots[i] {
                Some(Scalar::Int(v)) => Ok(*v),
                Some(other) => Err(err(format!("{} must be an integer, got {other}", params[i]))),
                None => Err(err(format!("missing {}", params[i]))),
            }
        };
        let text = |i: usize| -> Result<String, ParseError> {
            match &slots[i] {
                Some(Scalar::Str(v)) => Ok(v.clone()),
                Some(other) => Err(err(format!("{} must be a string, got {other}", params[i]))),
                None => Err(err(format!("missing {}", params[i]))),
            }
        };
        let direction = |i: usize| -> Result<Direction, ParseError> {
            let s = text(i)?;
            Direction::parse(&s).ok_or_else(|| err(format!("direction must be up, right, down or left, got {s:?}")))
        };
        let slot = |i: usize| -> Result<usize, ParseError> {
            let v = int(i)?;
            if (0..=MAX_SLOT as i64).contains(&v) {
                Ok(v as usize)
            } else {
                Err(err(format!("slot_index must be in 0..=35, got {v}")))
            }
        };
        let coord = |i: usize| -> Result<i32, ParseError> {
            let v = int(i)?;
            i32::try_from(v).map_err(|_| err(format!("{} out of range", params[i])))
        };
        Ok(match canon {
            "move" => Action::Move {
                x: coord(0)?,
                y: coord(1)?,
            },
            "use" => Action::Use { direction: direction(0)? },
            "interact" => Action::Interact { direction: direction(0)? },
            "choose_item" => Action::ChooseItem { slot_index: slot(0)? },
            "attach_item" => Action::AttachItem { slot_index: slot(0)? },
            "detach_item" => Action::DetachItem,
            "craft" => Action::Craft { item: text(0)? },
            "choose_option" => {
                let idx = int(0)?;
                if idx < 0 || idx > u32::MAX as i64 {
                    return Err(err(format!("option_index must be >= 0, got {idx}")));
                }
                let quantity = match slots[1] {
                    None => None,
                    Some(_) => {
                        let q = int(1)?;
                        if q < 1 || q > u32::MAX as i64 {
                            return Err(err(format!("quantity must be >= 1, got {q}")));
                        }
                        Some(q as u32)
                    }
                };
                let direction = match slots[2] {
                    None => None,
                    Some(_) => Some(match text(2)?.as_str() {
                        "in" => Flow::In,
                        "out" => Flow::Out,
                        other => return Err(err(format!("direction must be \"in\" or \"out\", got {other:?}"))),
                    }),
                };
                Action::ChooseOption {
                    option_index: idx as usize,
                    quantity,
                    direction,
                }
            }
            "menu" => {
                let option = match text(0)?.as_str() {
                    "open" => MenuOp::Open,
                    "close" => MenuOp::Close,
                    other => return Err(err(format!("option must be \"open\" or \"close\", got {other:?}"))),
                };
                let name = text(1)?;
                let menu_name = MENU_NAMES
                    .into_iter()
                    .find(|k| k.name() == name)
                    .ok_or_else(|| err(format!("unknown menu {name:?}")))?;
                Action::Menu { option, menu_name }
            }
            "navigate" => Action::Navigate { name: text(0)? },
            _ => unreachable!(),
        })
    }
}

impl FromStr for Action {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Action, ParseError> {
        Action::parse(s)
    }
}

fn quoted(s: &str) -> String {
    Scalar::Str(s.to_string()).to_string()
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Move { x, y } => write!(f, "move(x={x}, y={y})"),
            Action::Use { direction } => write!(f, "use(direction=\"{}\")", direction.name()),
            Action::Interact { direction } => write!(f, "interact(direction=\"{}\")", direction.name()),
            Action::ChooseItem { slot_index } => write!(f, "choose_item(slot_index={slot_index})"),
            Action::AttachItem { slot_index } => write!(f, "attach_item(slot_index={slot_index})"),
            Action::DetachItem => f.write_str("detach_item()"),
            Action::Craft { item } => write!(f, "craft(item={})", quoted(item)),
            Action::ChooseOption {
                option_index,
                quantity,
                direction,
            } => {
                write!(f, "choose_option(option_index={option_index}")?;
                if let Some(q) = quantity {
                    write!(f, ", quantity={q}")?;
                }
                if let Some(d) = direction {
                    write!(f, ", direction=\"{}\"", d.name())?;
                }
                f.write_str(")")
            }
            Action::Menu { option, menu_name } => {
                let op = match option {
                    MenuOp::Open => "open",
                    MenuOp::Close => "close",
                };
                write!(f, "menu(option=\"{op}\", menu_name=\"{}\")", menu_name.name())
            }
            Action::Navigate { name } => write!(f, "navigate(name={})", quoted(name)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_templates() {
        assert_eq!(Action::parse("move(x=0, y=1)").unwrap(), Action::Move { x: 0, y: 1 });
        assert_eq!(
            Action::parse("interact(\"up\")").unwrap(),
            Action::Interact { direction: Direction::Up }
        );
        assert_eq!(Action::parse("unattach_item()").unwrap(), Action::DetachItem);
        assert_eq!(
            Action::parse("choose_option(option_index=2, direction=\"out\")").unwrap(),
            Action::ChooseOption {
                option_index: 2,
                quantity: None,
                direction: Some(Flow::Out)
            }
        );
        assert_eq!(
            Action::parse("menu(option=\"open\", menu_name=\"map\")").unwrap(),
            Action::Menu {
                option: MenuOp::Open,
                menu_name: MenuKind::Map
            }
        );
    }

    #[test]
    fn rejects_out_of_grammar() {
        assert!(Action::parse("choose_item(slot_index=36)").is_err());
        assert!(Action::parse("fly()").is_err());
        assert!(Action::parse("use(direction=\"north\")").is_err());
        assert!(Action::parse("move(x=1)").is_err());
        assert!(Action::parse("menu(option=\"open\", menu_name=\"none\")").is_err());
        assert!(Action::parse("choose_option(option_index=0, quantity=0)").is_err());
    }
}
