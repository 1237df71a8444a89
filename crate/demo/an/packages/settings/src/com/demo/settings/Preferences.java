package com.demo.settings;

public class Preferences {
    private Storage storage;

    public String get(String key, String fallback) {
        String v = storage.read("prefs", key);
        return v == null ? fallback : v;
    }

    public void put(String key, String value) { storage.lock("prefs");
        storage.write("prefs", key, value);
        storage.flush();
    }
}
