# Package initializer for Shadows modules
