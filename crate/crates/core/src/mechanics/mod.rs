//! Game rules: the action grammar and what each action does to the world.

pub mod action;
pub mod execute;
pub mod menus;
pub mod monsters;
pub mod npc;
pub mod path;
