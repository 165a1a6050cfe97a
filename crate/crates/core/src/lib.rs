pub mod cactus;
pub mod character;
pub mod freegroup;
pub mod homology;
pub mod idealedge;
pub mod verify;
