import divctl
