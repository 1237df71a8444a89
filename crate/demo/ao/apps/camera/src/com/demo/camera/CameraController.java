package com.demo.camera;

public class CameraController {
    private Sensor sensor;
    private boolean previewing;
    private float focusDistance;

    public Photo takePhoto(int width, int height) {
        Frame frame = sensor.capture(width, height);
        frame.applyWhiteBalance(sensor.temperature());
        Photo photo = new Photo(frame.pixels(), width, height);
        photo.setTimestamp(System.currentTimeMillis());
        return photo;
    }

    public void startPreview(Surface surface) {
        if (previewing) {
            return;
        }
        sensor.attach(surface);
        sensor.setFrameRate(30);
        previewing = true;
    }

    public void stopPreview() {
        if (!previewing) {
            return;
        }
        sensor.detach();
        sensor.setFrameRate(0);
        previewing = false;
    }

    public float focus(float x, float y) {
        float distance = sensor.measureDepth(x, y);
        focusDistance = Math.max(0.1f, distance);
        sensor.moveLens(focusDistance);
        return focusDistance;
    }
}
