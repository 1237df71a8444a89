package com.demo.os;

public class SystemService {
    private ServiceRegistry registry;
    private PowerManager power;



    public void shutdown() {
        registry.stopAll();
        power.setState("halted");
        Watchdog.disarm();
    }

    public void reboot(String reason, boolean force) {
        shutdown();
        BootLog.write("reboot: " + reason);
        power.cycle();
    }

    public String status() {
        String state = power.currentState();
        return state + " with " + registry.size() + " services";
    }
}
